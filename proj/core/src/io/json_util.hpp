#pragma once

// Field access helpers shared by the JSON readers. Errors carry a JSON
// pointer to the offending field.

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tradenet/io/market_file.hpp"

namespace tradenet::io::detail {

using Json = nlohmann::ordered_json;

Json ParseJson(std::string_view text);

inline std::string Child(const std::string& ptr, std::string_view key) {
  return ptr + "/" + std::string(key);
}
inline std::string Child(const std::string& ptr, std::size_t index) {
  return ptr + "/" + std::to_string(index);
}

const Json& Require(const Json& obj, std::string_view key, const std::string& ptr);
void ExpectObject(const Json& j, const std::string& ptr);
const Json& ExpectArray(const Json& j, const std::string& ptr);

std::int64_t AsInt(const Json& j, const std::string& ptr);
std::uint64_t AsUint(const Json& j, const std::string& ptr);
double AsDouble(const Json& j, const std::string& ptr);
bool AsBool(const Json& j, const std::string& ptr);
std::string AsString(const Json& j, const std::string& ptr);

// Keys of `obj` outside `allowed` are rejected so that typos do not pass
// silently.
void RejectUnknownKeys(const Json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& ptr);

}  // namespace tradenet::io::detail
