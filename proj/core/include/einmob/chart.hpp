#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "einmob/expr.hpp"
#include "einmob/program.hpp"

namespace einmob {

struct Interval {
  double lo = 0;
  double hi = 0;
};

/// Coordinate values of a point on a chart.
using Point = std::vector<double>;

/// A coordinate chart with a sample box used for numeric trials.
///
/// Excluded-locus expressions must not vanish on the box; named constants
/// are bound here and substituted at evaluation time.
class Chart {
 public:
  Chart() = default;
  Chart(std::string name, std::vector<std::string> coordinates, std::vector<Interval> box,
        std::vector<Expr> excluded = {}, std::map<std::string, double> constants = {});

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] int dimension() const { return static_cast<int>(coordinates_.size()); }
  [[nodiscard]] const std::vector<std::string>& coordinates() const { return coordinates_; }
  [[nodiscard]] const std::vector<Interval>& box() const { return box_; }
  [[nodiscard]] const std::vector<Expr>& excluded() const { return excluded_; }
  [[nodiscard]] const std::map<std::string, double>& constants() const { return constants_; }
  [[nodiscard]] std::vector<std::string> constant_names() const;

  [[nodiscard]] Expr coordinate(int i) const { return Expr::coordinate(coordinates_.at(i)); }
  [[nodiscard]] int index_of(std::string_view name) const;

  [[nodiscard]] Expr parse(std::string_view text) const;
  [[nodiscard]] Expr derivative(const Expr& e, int i) const;
  [[nodiscard]] Program compile(const std::vector<Expr>& outputs) const;
  [[nodiscard]] double evaluate(const Expr& e, const Point& p) const;

  /// Throws unless p has the right size and lies in the sample box.
  void check_point(const Point& p) const;
  [[nodiscard]] Point center() const;

  /// Uniform points in the box, avoiding the excluded locus. Deterministic
  /// for a given seed.
  [[nodiscard]] std::vector<Point> sample(std::size_t count, std::uint64_t seed) const;

  [[nodiscard]] Chart with_box(std::vector<Interval> box) const;
  [[nodiscard]] Chart with_constants(std::map<std::string, double> constants) const;

 private:
  std::string name_;
  std::vector<std::string> coordinates_;
  std::vector<Interval> box_;
  std::vector<Expr> excluded_;
  std::map<std::string, double> constants_;
  Program excluded_program_;
};

enum class ZeroVerdict { proven_zero, numerically_zero, nonzero };

[[nodiscard]] const char* verdict_name(ZeroVerdict v);

struct ZeroReport {
  ZeroVerdict verdict = ZeroVerdict::proven_zero;
  double max_abs = 0;      // largest |e| over the trial points
  double scale = 0;        // largest absolute subterm value seen
  Point witness;           // set for nonzero verdicts
  std::size_t trials = 0;  // successful trial points
  std::size_t rejected = 0;  // points skipped because of domain errors

  [[nodiscard]] bool is_zero() const { return verdict != ZeroVerdict::nonzero; }
};

/// Symbolic fast path, then numeric trials: |e| < tol*(1+scale) at all
/// trial points counts as numerically zero.
[[nodiscard]] ZeroReport is_zero(const Expr& e, const Chart& chart, std::size_t trials = 20, std::uint64_t seed = 0,
                                 double tol = 1e-9);

}  // namespace einmob
