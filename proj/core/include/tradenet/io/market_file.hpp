#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tradenet/dynamics.hpp"
#include "tradenet/errors.hpp"
#include "tradenet/market.hpp"

namespace tradenet::io {

inline constexpr const char* kMarketSchema = "tradenet.market/1";

// Malformed input. `field` is a JSON pointer ("/agents/2/role") when the
// problem is tied to a field; line/column are 1-based and set for syntax
// errors only.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string field, std::size_t line = 0,
             std::size_t column = 0);
  const char* error_class() const noexcept override { return "parse"; }
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string field_;
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input describing an invalid market. Lists every violation.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const char* error_class() const noexcept override { return "validation"; }
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "io"; }
};

struct MarketDocument {
  Market market;
  std::optional<OfferState> offers;  // all agents unsatisfied
};

// Parses and validates a market file. Agents and trades come out sorted by
// id; trade endpoints and bundle entries refer to ids.
MarketDocument ParseMarket(std::string_view text);
// Canonical form: sorted by id, every table bundle listed in mask order.
std::string SerializeMarket(const Market& market, const OfferState* offers = nullptr);

std::string ReadFile(const std::filesystem::path& path);
// Creates parent directories.
void WriteFile(const std::filesystem::path& path, std::string_view contents);

MarketDocument LoadMarket(const std::filesystem::path& path);

}  // namespace tradenet::io
