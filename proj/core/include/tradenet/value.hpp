#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace tradenet {

using Price = std::int64_t;

// An integer extended with a single absorbing "minus infinity" sentinel used
// for infeasible bundles. The sentinel is never a large finite number: it
// absorbs addition and compares below every finite value.
class ExtValue {
 public:
  constexpr ExtValue() = default;
  constexpr ExtValue(std::int64_t v) : value_(v) {}  // NOLINT: implicit

  static constexpr ExtValue NegInf() {
    ExtValue v;
    v.finite_ = false;
    return v;
  }

  constexpr bool is_finite() const { return finite_; }
  constexpr bool is_neg_inf() const { return !finite_; }

  // Only meaningful for finite values.
  constexpr std::int64_t value() const { return value_; }

  friend constexpr ExtValue operator+(ExtValue a, ExtValue b) {
    if (!a.finite_ || !b.finite_) return NegInf();
    return ExtValue(a.value_ + b.value_);
  }
  friend constexpr ExtValue operator-(ExtValue a, std::int64_t b) {
    if (!a.finite_) return a;
    return ExtValue(a.value_ - b);
  }
  constexpr ExtValue& operator+=(ExtValue o) { return *this = *this + o; }

  friend constexpr bool operator==(ExtValue a, ExtValue b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend constexpr std::strong_ordering operator<=>(ExtValue a, ExtValue b) {
    if (!a.finite_ || !b.finite_) {
      return static_cast<int>(a.finite_) <=> static_cast<int>(b.finite_);
    }
    return a.value_ <=> b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, ExtValue v) {
    if (!v.finite_) return os << "-inf";
    return os << v.value_;
  }

 private:
  std::int64_t value_ = 0;
  bool finite_ = true;
};

inline constexpr ExtValue kNegInf = ExtValue::NegInf();

}  // namespace tradenet
