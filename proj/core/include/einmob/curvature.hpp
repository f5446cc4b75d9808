#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "einmob/metric.hpp"

namespace einmob {

/// Symbolic curvature data. gamma is indexed [k][i][j] = Γ^k_{ij},
/// riemann [l][i][j][k] = R^l_{ijk} with
/// R^l_{ijk} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik},
/// ricci [i][j] = R^k_{kij}.
struct CurvatureSet {
  int n = 0;
  std::vector<Expr> gamma;
  std::vector<Expr> riemann;
  std::vector<Expr> ricci;
  Expr scal;
  bool has_riemann = false;

  [[nodiscard]] const Expr& christoffel(int k, int i, int j) const { return gamma[static_cast<std::size_t>((k * n + i) * n + j)]; }
  [[nodiscard]] const Expr& riem(int l, int i, int j, int k) const {
    return riemann[static_cast<std::size_t>(((l * n + i) * n + j) * n + k)];
  }
  [[nodiscard]] const Expr& ric(int i, int j) const { return ricci[static_cast<std::size_t>(i * n + j)]; }
};

/// Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij). Requires a symbolic inverse.
[[nodiscard]] CurvatureSet christoffels(const MetricField& g);
[[nodiscard]] CurvatureSet curvature(const MetricField& g);

/// Numeric curvature at a point, computed from Taylor jets of g.
struct PointCurvature {
  int n = 0;
  Point point;
  Eigen::MatrixXd g;
  Eigen::MatrixXd ginv;
  std::vector<double> gamma;    // [k][i][j]
  std::vector<double> riemann;  // [l][i][j][k]
  Eigen::MatrixXd ricci;
  double scal = 0;

  [[nodiscard]] double christoffel(int k, int i, int j) const { return gamma[static_cast<std::size_t>((k * n + i) * n + j)]; }
  [[nodiscard]] double riem(int l, int i, int j, int k) const {
    return riemann[static_cast<std::size_t>(((l * n + i) * n + j) * n + k)];
  }
  /// R_{lijk} = g_{lm} R^m_{ijk}
  [[nodiscard]] double riem_lower(int l, int i, int j, int k) const;
};

[[nodiscard]] PointCurvature point_curvature(const MetricField& g, const Point& p);
[[nodiscard]] PointCurvature point_curvature(const MetricJet& jet);

struct SignatureCounts {
  int plus = 0;
  int minus = 0;
  friend bool operator==(const SignatureCounts&, const SignatureCounts&) = default;
};

/// Eigenvalue sign counts of g(p). Throws DegenerateMetricError when an
/// eigenvalue is below 1e-10·‖g(p)‖.
[[nodiscard]] SignatureCounts signature(const MetricField& g, const Point& p);
/// Signature over the sample box; throws std::runtime_error if it varies.
[[nodiscard]] SignatureCounts signature(const MetricField& g, std::size_t trials = 20, std::uint64_t seed = 0);

struct CheckOptions {
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  double tol = 1e-9;
};

struct EinsteinReport {
  bool einstein = false;
  double scal = 0;       // mean scalar curvature over the trial points
  double B = 0;          // −Scal/(n(n−1)) when Einstein
  double max_residual = 0;
  double scal_spread = 0;  // max |Scal(p) − Scal(p0)|
  Point witness;
  std::string witness_component;
  std::size_t trials = 0;
};

[[nodiscard]] EinsteinReport is_einstein(const MetricField& g, const CheckOptions& opt = {});

struct ConstantCurvatureReport {
  bool constant = false;
  double c = 0;
  double max_residual = 0;
  Point witness;
};

/// Tests R_{lijk} = c (g_{li} g_{jk} − g_{lj} g_{ik}) with c = Scal/(n(n−1)).
[[nodiscard]] ConstantCurvatureReport is_constant_curvature(const MetricField& g, const CheckOptions& opt = {});

/// Largest absolute residual of the first Bianchi identity and of the
/// Ricci symmetry, over trial points.
struct IdentityReport {
  double bianchi = 0;
  double ricci_asymmetry = 0;
  double scale = 0;
};
[[nodiscard]] IdentityReport curvature_identities(const MetricField& g, const CheckOptions& opt = {});

}  // namespace einmob
