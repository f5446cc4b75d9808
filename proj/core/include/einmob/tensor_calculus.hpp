#pragma once

#include <functional>
#include <vector>

#include "einmob/curvature.hpp"
#include "einmob/metric.hpp"
#include "einmob/tensor.hpp"

namespace einmob {

/// ∇T with the new covariant slot appended last. Needs a symbolic inverse.
[[nodiscard]] TensorField covariant_derivative(const TensorField& t, const MetricField& g);
[[nodiscard]] TensorField covariant_derivative(const TensorField& t, const CurvatureSet& gamma);

/// (L_v g)_ij = v^k ∂_k g_ij + g_kj ∂_i v^k + g_ik ∂_j v^k
[[nodiscard]] TensorField lie_derivative_metric(const TensorField& v, const MetricField& g);

/// Lowers contravariant slot `slot` (0-based among the upper indices); the
/// lowered index becomes the first covariant index.
[[nodiscard]] TensorField lower_index(const TensorField& t, const MetricField& g, int slot = 0);
/// Raises covariant slot `slot` (0-based among the lower indices); the raised
/// index becomes the last contravariant index.
[[nodiscard]] TensorField raise_index(const TensorField& t, const MetricField& g, int slot = 0);

/// g^{ij} T_ij for a (0,2) tensor.
[[nodiscard]] Expr trace(const TensorField& t, const MetricField& g);
/// Exterior derivative of a scalar.
[[nodiscard]] TensorField gradient_form(const Expr& f, const Chart& chart);
/// g(X, Y) for vector fields.
[[nodiscard]] Expr inner(const TensorField& x, const TensorField& y, const MetricField& g);

/// Numeric values of ∇T at p, computed from jets (no symbolic inverse needed).
[[nodiscard]] std::vector<double> covariant_derivative_values(const TensorField& t, const MetricField& g, const Point& p);
/// Numeric values of L_v g at p.
[[nodiscard]] std::vector<double> lie_derivative_metric_values(const TensorField& v, const MetricField& g, const Point& p);

struct ResidualReport {
  double max_abs = 0;  // largest absolute residual component
  double scale = 0;    // largest magnitude of the quantities being compared
  Point witness;       // point attaining max_abs
  std::size_t trials = 0;

  [[nodiscard]] bool within(double tol) const { return max_abs <= tol * (1 + scale); }
  void merge(const ResidualReport& o);
};

/// Evaluates `f` (returning residual components and a scale) at trial points.
[[nodiscard]] ResidualReport sample_residual(const Chart& chart, const CheckOptions& opt,
                                             const std::function<std::pair<std::vector<double>, double>(const Point&)>& f);

/// Residual of symbolic components that should vanish.
[[nodiscard]] ResidualReport zero_residual(const std::vector<Expr>& components, const Chart& chart,
                                           const CheckOptions& opt = {});

/// Residual of ∇T = 0, computed numerically.
[[nodiscard]] ResidualReport parallel_residual(const TensorField& t, const MetricField& g, const CheckOptions& opt = {});

}  // namespace einmob
