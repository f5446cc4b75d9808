#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "einmob/metric.hpp"
#include "einmob/tensor.hpp"
#include "einmob/tensor_calculus.hpp"

namespace einmob {

/// A candidate solution (L, Λ, λ, μ) of the extended system with constant B:
///   ∇_k L_ij = g_ki Λ_j + g_kj Λ_i,  ∇Λ = μ g + B L,  dμ = 2 B Λ.
struct SolutionTriple {
  TensorField L;
  TensorField Lambda;
  Expr lambda;
  Expr mu;
  double B = 0;
};

class DegenerateSolutionError : public std::runtime_error {
 public:
  DegenerateSolutionError(const std::string& what, double suggested_shift)
      : std::runtime_error(what), suggested_shift_(suggested_shift) {}
  /// A t for which L + t·g is nondegenerate on the sample box.
  [[nodiscard]] double suggested_shift() const { return suggested_shift_; }

 private:
  double suggested_shift_;
};

/// L(g, ḡ) = |det ḡ / det g|^{1/(n+1)} g ḡ^{-1} g.
[[nodiscard]] TensorField l_of_pair(const MetricField& g, const MetricField& gbar);

struct MainReport {
  bool pass = false;
  bool affine = false;  // Λ vanishes identically (L is parallel)
  ResidualReport residual;
  double max_Lambda = 0;
  std::optional<Expr> lambda;          // ½ trace(L♯), when g has a symbolic inverse
  std::optional<TensorField> Lambda;   // dλ
};

/// Checks ∇_k L_ij − (g_ki Λ_j + g_kj Λ_i) = 0 with λ = ½ trace L♯, Λ = dλ.
[[nodiscard]] MainReport verify_main(const MetricField& g, const TensorField& L, const CheckOptions& opt = {});

/// Builds (L, Λ = dλ, λ, μ, B), deriving μ = 2Bλ + c with c read off at the
/// box centre from the second equation of the extended system.
[[nodiscard]] SolutionTriple make_triple(const MetricField& g, const TensorField& L, double B);

struct ExtSysReport {
  bool pass = false;
  ResidualReport first;   // ∇L − X♭⊙Λ
  ResidualReport second;  // ∇Λ − μg − BL
  ResidualReport third;   // dμ − 2BΛ
  double B = 0;
};

class BMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Residuals of the extended system; throws BMismatchError unless g is
/// Einstein with −Scal/(n(n−1)) = s.B.
[[nodiscard]] ExtSysReport verify_extsys(const MetricField& g, const SolutionTriple& s, const CheckOptions& opt = {});

/// Grid search for t with det(L♯ + t·Id) bounded away from zero on the box.
[[nodiscard]] double admissible_shift(const MetricField& g, const TensorField& L, const CheckOptions& opt = {});

/// ḡ = (det L♯)^{-1} g((L♯)^{-1}·,·). Throws DegenerateSolutionError when L
/// is degenerate somewhere on the box.
[[nodiscard]] MetricField reconstruct_metric(const MetricField& g, const TensorField& L, MetricOptions options = {});

struct DeformationReport {
  TensorField phi;  // L_v g − trace((L_v g)♯)/(n+1) g
  MainReport main;
  bool projective = false;
  bool homothety = false;
  double homothety_factor = 0;  // φ = k g when homothety
};

[[nodiscard]] DeformationReport projective_deformation(const TensorField& v, const MetricField& g,
                                                       const CheckOptions& opt = {});

struct SplittingFit {
  double C = 0;
  ResidualReport residual;  // φ − 2BL + C g
  double C_spread = 0;
};

/// Fits φ = 2BL − C g for a constant C.
[[nodiscard]] SplittingFit fit_splitting(const TensorField& phi, const TensorField& L, double B, const MetricField& g,
                                         const CheckOptions& opt = {});

struct GeodesicSeed {
  Point x;
  std::vector<double> v;
};

struct GeodesicOptions {
  int steps = 40;
  double step = 0.02;
  double tol = 1e-6;
};

struct SeedResult {
  bool pass = true;
  double max_ratio = 0;  // largest minor divided by its scale
  int steps_taken = 0;
  bool left_chart = false;
};

struct GeodesicReport {
  bool pass = true;
  double worst_ratio = 0;
  std::vector<SeedResult> seeds;
};

/// Integrates g-geodesics (RK4) and checks that (Γ̄ − Γ)(γ̇, γ̇) stays
/// collinear with γ̇ via all 2×2 minors.
[[nodiscard]] GeodesicReport geodesic_projective_test(const MetricField& g, const MetricField& gbar,
                                                      const std::vector<GeodesicSeed>& seeds,
                                                      const GeodesicOptions& opt = {});

/// Random seeds inside the box with unit-size random directions.
[[nodiscard]] std::vector<GeodesicSeed> random_seeds(const Chart& chart, std::size_t count, std::uint64_t seed);

}  // namespace einmob
