#include "json_util.hpp"

#include <algorithm>

namespace tradenet::io::detail {
namespace {

// 1-based line and column of byte offset `pos`.
std::pair<std::size_t, std::size_t> LineColumn(std::string_view text, std::size_t pos) {
  pos = std::min(pos, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t k = 0; k < pos; ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const auto [line, column] = LineColumn(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    const auto colon = what.rfind(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what,
                     "", line, column);
  }
}

const Json& Require(const Json& obj, std::string_view key, const std::string& ptr) {
  ExpectObject(obj, ptr);
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    throw ParseError("missing field " + Child(ptr, key), Child(ptr, key));
  }
  return *it;
}

void ExpectObject(const Json& j, const std::string& ptr) {
  if (!j.is_object()) throw ParseError("expected an object at " + (ptr.empty() ? "/" : ptr), ptr);
}

const Json& ExpectArray(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw ParseError("expected an array at " + ptr, ptr);
  return j;
}

std::int64_t AsInt(const Json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ParseError("expected an integer at " + ptr, ptr);
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw ParseError("integer out of range at " + ptr, ptr);
  }
  return j.get<std::int64_t>();
}

std::uint64_t AsUint(const Json& j, const std::string& ptr) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ParseError("expected a non-negative integer at " + ptr, ptr);
  }
  return j.get<std::uint64_t>();
}

double AsDouble(const Json& j, const std::string& ptr) {
  if (!j.is_number()) throw ParseError("expected a number at " + ptr, ptr);
  return j.get<double>();
}

bool AsBool(const Json& j, const std::string& ptr) {
  if (!j.is_boolean()) throw ParseError("expected true or false at " + ptr, ptr);
  return j.get<bool>();
}

std::string AsString(const Json& j, const std::string& ptr) {
  if (!j.is_string()) throw ParseError("expected a string at " + ptr, ptr);
  return j.get<std::string>();
}

void RejectUnknownKeys(const Json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& ptr) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ParseError("unknown field " + Child(ptr, item.key()), Child(ptr, item.key()));
    }
  }
}

}  // namespace tradenet::io::detail
