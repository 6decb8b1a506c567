#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace adapterforge {

/// Exact rational number, always normalized (den > 0, gcd(num, den) == 1).
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  /// Parses "3", "-2", "0.05", "17/20". Throws Error(E_CONFIG) on malformed input.
  static Rational parse(std::string_view text);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  bool operator==(const Rational& o) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  /// "num/den" (or "num" when den == 1); round-trips through parse.
  std::string to_string() const;
  /// Fixed three-decimal rendering, rounded half away from zero: "0.850".
  std::string to_fixed3() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace adapterforge
