#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace einmob {

/// Index tables for truncated multivariate Taylor series in `nvars`
/// variables up to total degree `max_order`. Multi-indices are stored in
/// graded order, so the coefficients of degree <= k form a prefix.
class JetSpace {
 public:
  static std::shared_ptr<const JetSpace> get(int nvars, int max_order);

  JetSpace(int nvars, int max_order);

  [[nodiscard]] int nvars() const { return nvars_; }
  [[nodiscard]] int max_order() const { return max_order_; }
  /// Number of monomials of degree <= order.
  [[nodiscard]] std::size_t size(int order) const { return degree_end_[order]; }
  [[nodiscard]] const std::vector<int>& exponents(std::size_t i) const { return exps_[i]; }
  [[nodiscard]] int degree(std::size_t i) const { return degree_[i]; }
  /// Index of a multi-index, or -1 if its degree exceeds max_order.
  [[nodiscard]] std::int64_t index_of(const std::vector<int>& alpha) const;

  struct Triple {
    std::uint32_t a, b, out;
  };
  // Product terms a*b -> out, grouped by degree of out.
  [[nodiscard]] const std::vector<Triple>& triples() const { return triples_; }
  [[nodiscard]] std::size_t triples_end(int order) const { return triple_end_[order]; }

  // For variable v and target index beta (degree < max_order): the source
  // index of beta + e_v.
  [[nodiscard]] std::uint32_t shift_up(int v, std::size_t beta) const { return up_[v][beta]; }

 private:
  int nvars_;
  int max_order_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> degree_;
  std::vector<std::size_t> degree_end_;
  std::vector<Triple> triples_;
  std::vector<std::size_t> triple_end_;
  std::vector<std::vector<std::uint32_t>> up_;
  std::vector<std::uint64_t> keys_;  // sorted encoded multi-indices
  std::vector<std::uint32_t> key_index_;
  std::uint64_t encode(const std::vector<int>& alpha) const;
};

/// Truncated Taylor expansion: coefficient i multiplies
/// (x - x0)^alpha_i, so c[i] = (d^alpha f)(x0) / alpha!.
class Jet {
 public:
  Jet() = default;
  Jet(const JetSpace* space, int order) : space_(space), order_(order), c_(space->size(order), 0.0) {}

  static Jet constant(const JetSpace* space, int order, double v);
  static Jet variable(const JetSpace* space, int order, int var, double x0);

  [[nodiscard]] const JetSpace* space() const { return space_; }
  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] double value() const { return c_[0]; }
  [[nodiscard]] const std::vector<double>& coefficients() const { return c_; }
  [[nodiscard]] std::vector<double>& coefficients() { return c_; }
  [[nodiscard]] bool is_zero() const;

  /// Partial derivative d/dx_var; the order drops by one.
  [[nodiscard]] Jet derivative(int var) const;
  /// Value of d^alpha f at the base point.
  [[nodiscard]] double partial(const std::vector<int>& alpha) const;
  [[nodiscard]] Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  Jet operator-() const;

  /// this += a*b, truncated to this->order().
  void add_product(const Jet& a, const Jet& b, double scale = 1.0);

 private:
  const JetSpace* space_ = nullptr;
  int order_ = 0;
  std::vector<double> c_;
};

/// f(u) from the Taylor coefficients f^(k)(u0)/k!, k = 0..order.
[[nodiscard]] Jet compose(const Jet& u, const std::vector<double>& taylor);

[[nodiscard]] Jet reciprocal(const Jet& u);
[[nodiscard]] Jet power(const Jet& u, double exponent, bool integer_exponent);
[[nodiscard]] Jet exp(const Jet& u);
[[nodiscard]] Jet sin(const Jet& u);
[[nodiscard]] Jet cos(const Jet& u);
[[nodiscard]] Jet sinh(const Jet& u);
[[nodiscard]] Jet cosh(const Jet& u);

}  // namespace einmob
