#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "einmob/rational.hpp"

namespace einmob {

enum class ExprKind : std::uint8_t {
  constant,
  coordinate,
  symbol,
  sum,
  product,
  power,
  quotient,
  negate,
  function,
};

enum class Func : std::uint8_t { exp, sin, cos, sinh, cosh, sqrt, abs };

[[nodiscard]] const char* func_name(Func f);

/// Raised when an expression is evaluated (or constant-folded) outside its
/// real domain. `subexpression` is the printed form of the offending node.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : std::domain_error(what + ": " + subexpression), subexpression_(std::move(subexpression)) {}
  [[nodiscard]] const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

struct ExprNode;

/// Immutable symbolic scalar expression.
///
/// Nodes are shared and never mutated, so copies are cheap and values can be
/// handed between threads freely. The arithmetic operators and the named
/// functions below return normalized results; the `make_*` factories build
/// raw (unnormalized) nodes, which is what the parser produces before
/// `normalize` runs.
class Expr {
 public:
  Expr();  // constant 0
  Expr(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Expr(int value) : Expr(static_cast<std::int64_t>(value)) {}  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expr coordinate(std::string name);
  static Expr symbol(std::string name);

  static Expr make_sum(std::vector<Expr> terms);
  static Expr make_product(std::vector<Expr> factors);
  static Expr make_power(Expr base, Rational exponent);
  static Expr make_quotient(Expr numerator, Expr denominator);
  static Expr make_negate(Expr operand);
  static Expr make_function(Func f, Expr argument);

  [[nodiscard]] ExprKind kind() const;
  [[nodiscard]] const std::vector<Expr>& args() const;
  /// Constant value (kind constant) or exponent (kind power).
  [[nodiscard]] const Rational& value() const;
  [[nodiscard]] const std::string& name() const;
  [[nodiscard]] Func func() const;
  [[nodiscard]] bool is_normalized() const;
  [[nodiscard]] std::size_t hash() const;
  [[nodiscard]] const ExprNode* node() const { return node_.get(); }

  [[nodiscard]] bool is_constant() const { return kind() == ExprKind::constant; }
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool is_one() const;

  /// Number of distinct nodes in the expression DAG.
  [[nodiscard]] std::size_t node_count() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  friend struct ExprFactory;

  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  ExprKind kind = ExprKind::constant;
  Func func = Func::exp;
  Rational value;
  std::string name;
  std::vector<Expr> args;
  std::size_t hash = 0;
  bool normal = false;
};

/// Total structural order used for canonical forms.
[[nodiscard]] int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

/// Terminating rewrite to canonical form: rational constant folding,
/// flattening, like-term collection, power merging, exp merging and
/// bounded distribution of products over sums.
[[nodiscard]] Expr normalize(const Expr& e);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

[[nodiscard]] Expr sum(std::span<const Expr> terms);
[[nodiscard]] Expr product(std::span<const Expr> factors);
[[nodiscard]] Expr pow(const Expr& base, const Rational& exponent);
[[nodiscard]] Expr apply(Func f, const Expr& argument);
[[nodiscard]] Expr exp(const Expr& a);
[[nodiscard]] Expr sin(const Expr& a);
[[nodiscard]] Expr cos(const Expr& a);
[[nodiscard]] Expr sinh(const Expr& a);
[[nodiscard]] Expr cosh(const Expr& a);
[[nodiscard]] Expr sqrt(const Expr& a);
[[nodiscard]] Expr abs(const Expr& a);

/// Printed form in the parser's grammar (ASCII, '^' for powers).
[[nodiscard]] std::string to_string(const Expr& e);

}  // namespace einmob
