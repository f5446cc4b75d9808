#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "einmob/curvature.hpp"
#include "einmob/metric.hpp"
#include "einmob/projective.hpp"
#include "einmob/tensor_calculus.hpp"

namespace einmob {

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructed metric together with its cone vector field, if any.
struct Construction {
  MetricField metric;
  std::optional<TensorField> xi;             // satisfies ∇ξ = Id
  std::optional<ResidualReport> xi_residual;  // max |∇ξ - Id|
};

/// Cone vector field check: max |∇_j ξ^i - δ^i_j| over trial points.
[[nodiscard]] ResidualReport cone_field_residual(const TensorField& xi, const MetricField& g,
                                                 const CheckOptions& opt = {});

struct ConeOptions {
  std::string radial = "r";
  Interval r_box{0.5, 2.0};
};

/// ĝ = sign·dr² + r²g on R_{>0} × chart, with ξ = r∂_r attached and checked.
[[nodiscard]] Construction cone(const MetricField& g, int sign = 1, const ConeOptions& opt = {});

/// -g on the same chart.
[[nodiscard]] MetricField sign_flip(const MetricField& g);

/// Copy of g with coordinates renamed by appending `suffix`.
[[nodiscard]] MetricField rename_coordinates(const MetricField& g, const std::string& suffix);

/// Flat R^k in Cartesian coordinates with position field ξ = x^i∂_i.
[[nodiscard]] Construction flat_space(int k, const std::string& prefix = "x", Interval box = {-1.0, 1.0});

/// Block-diagonal sum on the product chart. When both factors carry cone
/// fields, ξ = ξ₁ + ξ₂ is attached and re-verified. Coordinate names must be
/// disjoint.
[[nodiscard]] Construction product(const Construction& a, const Construction& b);
[[nodiscard]] Construction product(const MetricField& a, const MetricField& b);

/// Doubly warped metric h = h₀ + Σ (λ + C − ρ_i)² h_i.
///
/// On N₀ the solution is L₀ = (λ + C)h₀ + φ dλ², the Jordan block with
/// eigenvalue λ + C; φ is supplied as `nilpotent`.
struct WarpedSpec {
  MetricField h0;
  Expr lambda;
  Expr nilpotent;
  std::vector<MetricField> blocks;
  double C = 0;
  std::vector<double> rho;
};

struct WarpedResult {
  MetricField metric;
  SolutionTriple solution;
  ExtSysReport extsys;
  ResidualReport levi_civita;   // connection identities against the factors
  ResidualReport curvature;     // R(X_i, Y_i) = R^i(X_i, Y_i), R(X_j, X_k) = 0
  ResidualReport ricci;         // block Ricci identities
  std::vector<int> offsets;     // first coordinate of each factor (N₀ first)
};

[[nodiscard]] WarpedResult warped(const WarpedSpec& spec, const CheckOptions& opt = {});

struct ParallelFieldReport {
  TensorField W;
  ResidualReport parallel;
  ResidualReport direc1;  // ∇_Y U = 0 for Y in TN_i (i < m) and Y = Λ♯
  ResidualReport direc3;  // ∇_V U = -h(V, U)Λ♯ / (λ + C − ρ_m) for V in TN_m
  bool independent = false;
};

/// W = (λ + C − ρ_m)U + uΛ♯ with U = h⁻¹du, for u on the last (flat) block
/// with du parallel and of unit length.
[[nodiscard]] ParallelFieldReport warped_parallel_field(const WarpedSpec& spec, const WarpedResult& warped,
                                                         const Expr& u, const CheckOptions& opt = {});

struct NullConeFamily {
  Construction cone;  // ĝ = dr² + r²(−dt² + e^{2t}h)
  TensorField v;      // e^t(∂_r − ∂_t / r)
  TensorField V;
  ResidualReport v_parallel;
  ResidualReport V_parallel;
  ResidualReport hessian;  // ∇^h∇^h F − C h
  double g_v_V = 0;        // ĝ(v, V) at the centre
  double g_V_V = 0;        // ĝ(V, V) at the centre
};

[[nodiscard]] NullConeFamily null_cone_family(const MetricField& h, const Expr& F, double C,
                                              const CheckOptions& opt = {});

/// Lift of a base solution to the cone ĝ = dr² + r²g:
/// Â = r²L − r·dr⊙Λ + μ dr². With middle_sign = +1 the other sign is used.
[[nodiscard]] TensorField cone_lift(const Construction& cone, const SolutionTriple& s, int middle_sign = -1);

struct NamedSolution {
  std::string name;
  SolutionTriple triple;
};

struct NamedField {
  std::string name;
  TensorField field;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  MetricField metric;
  std::vector<NamedSolution> solutions;
  std::vector<NamedField> parallel_fields;  // parallel vector fields
  std::optional<TensorField> xi;
  std::optional<double> scal;
  std::optional<SignatureCounts> signature;
  std::optional<int> mobility;     // degree of mobility D
  std::optional<int> par02;        // dim Par^{0,2}
  std::optional<int> k;
  std::optional<int> l;
  std::optional<std::string> base;  // catalog name of the base of a cone
  std::optional<int> realizes_n;    // base dimension whose mobility list the count belongs to
  std::optional<bool> lorentz_list;
};

[[nodiscard]] std::vector<std::string> catalog_names();
/// Builds and verifies a single entry; throws ConstructionError with the
/// failing residual when an attached claim does not hold.
[[nodiscard]] CatalogEntry catalog_entry(const std::string& name);
[[nodiscard]] std::vector<CatalogEntry> catalog();

/// The warped instance used by the catalog.
[[nodiscard]] WarpedSpec catalog_warped_spec();

}  // namespace einmob
