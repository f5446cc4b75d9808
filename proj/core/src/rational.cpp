#include "einmob/rational.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace einmob {

Rational make_canonical(std::int64_t num, std::int64_t den) { return Rational(num, den, Rational::canonical_tag{}); }

namespace {

__extension__ typedef __int128 wide;

std::int64_t narrow(wide v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("rational arithmetic overflow");
  }
  return static_cast<std::int64_t>(v);
}

wide gcd_wide(wide a, wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make(wide num, wide den) {
  if (den == 0) throw std::domain_error("rational division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  wide g = gcd_wide(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return make_canonical(narrow(num), narrow(den));
}

// Exact integer k-th root of v >= 0, if any.
std::optional<std::int64_t> integer_root(std::int64_t v, std::int64_t k) {
  if (v < 0) return std::nullopt;
  if (v <= 1) return v;
  auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(k))));
  for (std::int64_t c = std::max<std::int64_t>(0, guess - 1); c <= guess + 1; ++c) {
    wide p = 1;
    bool over = false;
    for (std::int64_t i = 0; i < k; ++i) {
      p *= c;
      if (p > v) {
        over = true;
        break;
      }
    }
    if (!over && p == v) return c;
  }
  return std::nullopt;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) { *this = make(num, den); }

Rational operator+(const Rational& a, const Rational& b) {
  return make(static_cast<wide>(a.num_) * b.den_ + static_cast<wide>(b.num_) * a.den_,
              static_cast<wide>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return make(static_cast<wide>(a.num_) * b.num_, static_cast<wide>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("rational division by zero");
  return make(static_cast<wide>(a.num_) * b.den_, static_cast<wide>(a.den_) * b.num_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = narrow(-static_cast<wide>(num_));
  r.den_ = den_;
  return r;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<wide>(a.num_) * b.den_ < static_cast<wide>(b.num_) * a.den_;
}

Rational Rational::pow(std::int64_t exponent) const {
  if (exponent < 0) return Rational(1) / pow(-exponent);
  Rational result(1);
  Rational base = *this;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

std::optional<Rational> Rational::exact_pow(const Rational& exponent) const {
  if (exponent.is_integer()) {
    if (num_ == 0 && exponent.num_ < 0) return std::nullopt;
    return pow(exponent.num_);
  }
  if (num_ == 0) {
    if (exponent.is_negative()) return std::nullopt;
    return Rational(0);
  }
  const std::int64_t q = exponent.den_;
  std::int64_t n = num_;
  bool negate = false;
  if (n < 0) {
    if (q % 2 == 0) return std::nullopt;
    negate = true;
    n = -n;
  }
  auto rn = integer_root(n, q);
  auto rd = integer_root(den_, q);
  if (!rn || !rd) return std::nullopt;
  Rational root(negate ? -*rn : *rn, *rd);
  try {
    return root.pow(exponent.num_);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

Rational Rational::parse_decimal(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty numeric literal");
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  wide mantissa = 0;
  std::int64_t scale = 0;
  bool any_digit = false;
  bool after_point = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (mantissa > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("numeric literal too long");
      if (after_point) --scale;
      any_digit = true;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("malformed numeric literal");
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    std::int64_t e = 0;
    bool exp_digit = false;
    for (; pos < text.size() && text[pos] >= '0' && text[pos] <= '9'; ++pos) {
      e = e * 10 + (text[pos] - '0');
      if (e > 40) throw std::overflow_error("numeric literal exponent too large");
      exp_digit = true;
    }
    if (!exp_digit) throw std::invalid_argument("malformed exponent in numeric literal");
    scale += exp_negative ? -e : e;
  }
  if (pos != text.size()) throw std::invalid_argument("trailing characters in numeric literal");
  Rational value(narrow(negative ? -mantissa : mantissa));
  return value * Rational(10).pow(scale);
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::size_t Rational::hash() const {
  std::size_t h = std::hash<std::int64_t>{}(num_);
  return h ^ (std::hash<std::int64_t>{}(den_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace einmob

namespace einmob {

Rational rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::domain_error("cannot rationalize a non-finite value");
  if (std::fabs(x) > 1e15) throw std::overflow_error("value too large to rationalize");
  // Convergents h/k of the continued fraction of x.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(r);
    auto ai = static_cast<std::int64_t>(a);
    std::int64_t k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    std::int64_t h2 = ai * h1 + h0;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = r - a;
    if (frac < 1e-15 || std::fabs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= 1e-15 * std::fabs(x)) break;
    r = 1.0 / frac;
  }
  return Rational(h1, k1);
}

}  // namespace einmob
