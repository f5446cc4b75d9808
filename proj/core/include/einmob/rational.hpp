#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace einmob {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Arithmetic is checked: any intermediate result that does not fit throws
/// std::overflow_error. The representation is canonical (gcd-reduced,
/// positive denominator), so equality is member-wise.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }

  [[nodiscard]] bool is_zero() const { return num_ == 0; }
  [[nodiscard]] bool is_one() const { return num_ == 1 && den_ == 1; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }
  [[nodiscard]] bool is_negative() const { return num_ < 0; }
  [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }

  /// Integer power; negative exponents invert.
  [[nodiscard]] Rational pow(std::int64_t exponent) const;

  /// Exact value of this^exponent when it is rational (e.g. 4^(1/2) = 2,
  /// 8^(-2/3) = 1/4); std::nullopt when irrational or undefined over the reals.
  [[nodiscard]] std::optional<Rational> exact_pow(const Rational& exponent) const;

  /// Parses "12", "-3", "0.125", "1e-5", "2.5E3" exactly.
  static Rational parse_decimal(std::string_view text);

  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] std::size_t hash() const;

 private:
  struct canonical_tag {};
  constexpr Rational(std::int64_t num, std::int64_t den, canonical_tag) : num_(num), den_(den) {}
  friend Rational make_canonical(std::int64_t num, std::int64_t den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace einmob

namespace einmob {

/// Best rational approximation of x with denominator at most max_den
/// (continued fractions).
[[nodiscard]] Rational rationalize(double x, std::int64_t max_den = 1'000'000);

}  // namespace einmob
