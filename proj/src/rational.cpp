#include "adapterforge/rational.hpp"

#include <charconv>
#include <numeric>

#include "adapterforge/error.hpp"

namespace adapterforge {

namespace {

__extension__ using wide = __int128;

Rational from_wide(wide num, wide den)
{
  if (den == 0) {
    throw Error(ErrorCode::Config, "rational with zero denominator");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  wide a = num < 0 ? -num : num;
  wide b = den;
  while (b != 0) {
    wide t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr wide lim = INT64_MAX;
  if (num > lim || num < -lim || den > lim) {
    throw Error(ErrorCode::Config, "rational overflow");
  }
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::int64_t parse_int(std::string_view text, std::string_view whole)
{
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::Config, "malformed number '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den)
{
  if (den == 0) {
    throw Error(ErrorCode::Config, "rational with zero denominator");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Rational Rational::parse(std::string_view text)
{
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    return Rational(parse_int(text, text));
  }
  std::string_view int_part = text.substr(0, dot);
  std::string_view frac = text.substr(dot + 1);
  bool negative = !int_part.empty() && int_part.front() == '-';
  if (negative) {
    int_part.remove_prefix(1);
  }
  if (frac.empty() || frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string_view::npos ||
      int_part.find_first_not_of("0123456789") != std::string_view::npos) {
    throw Error(ErrorCode::Config, "malformed decimal '" + std::string(text) + "'");
  }
  std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) {
    scale *= 10;
  }
  wide num = static_cast<wide>(whole) * scale + parse_int(frac, text);
  return from_wide(negative ? -num : num, scale);
}

Rational Rational::operator+(const Rational& o) const
{
  return from_wide(static_cast<wide>(num_) * o.den_ + static_cast<wide>(o.num_) * den_,
                   static_cast<wide>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const
{
  return from_wide(static_cast<wide>(num_) * o.den_ - static_cast<wide>(o.num_) * den_,
                   static_cast<wide>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const
{
  return from_wide(static_cast<wide>(num_) * o.num_, static_cast<wide>(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const
{
  return from_wide(static_cast<wide>(num_) * o.den_, static_cast<wide>(den_) * o.num_);
}

std::strong_ordering Rational::operator<=>(const Rational& o) const
{
  wide lhs = static_cast<wide>(num_) * o.den_;
  wide rhs = static_cast<wide>(o.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::to_string() const
{
  if (den_ == 1) {
    return std::to_string(num_);
  }
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::to_fixed3() const
{
  wide n = static_cast<wide>(num_) * 1000;
  bool negative = n < 0;
  if (negative) {
    n = -n;
  }
  wide q = (2 * n + den_) / (2 * static_cast<wide>(den_));
  auto millis = static_cast<std::int64_t>(q);
  std::string frac = std::to_string(millis % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return (negative && millis != 0 ? "-" : "") + std::to_string(millis / 1000) + "." + frac;
}

}  // namespace adapterforge
