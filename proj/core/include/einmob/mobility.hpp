#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "einmob/curvature.hpp"
#include "einmob/enumerate.hpp"
#include "einmob/metric.hpp"
#include "einmob/projective.hpp"

namespace einmob {

enum class FiberKind { prolongation, sym2, oneform, vector };

[[nodiscard]] std::string fiber_name(FiberKind k);

/// Index of the unordered pair {a, b} in the packed list (0,0), (0,1), ...,
/// (0,n-1), (1,1), ... used for symmetric two-tensor fibers.
[[nodiscard]] int pair_index(int n, int a, int b);

/// A vector bundle over a chart with a linear connection, written as
/// connection matrices A_i so that a section s is parallel iff
/// ∂_i s + A_i s = 0.
///
/// Prolongation fibers are ordered as (L_ab for a <= b, Λ_a, μ); symmetric
/// two-tensor fibers as the packed pairs of pair_index.
class LinearConnectionBundle {
 public:
  LinearConnectionBundle(MetricField g, FiberKind kind, double B = 0);

  [[nodiscard]] const MetricField& metric() const { return g_; }
  [[nodiscard]] const Chart& chart() const { return g_.chart(); }
  [[nodiscard]] FiberKind kind() const { return kind_; }
  [[nodiscard]] int fiber_dimension() const { return N_; }
  [[nodiscard]] double B() const { return B_; }

  /// Taylor jets of A_0..A_{n-1} at p, accurate to the given order.
  [[nodiscard]] std::vector<MatJet> connection_jets(const Point& p, int order) const;
  [[nodiscard]] std::vector<Eigen::MatrixXd> connection_values(const Point& p) const;

  /// A_i with Expr entries (row-major N x N per i). Requires the symbolic
  /// Christoffel symbols, so the metric must have a symbolic inverse.
  [[nodiscard]] std::vector<std::vector<Expr>> symbolic_connection() const;

 private:
  MetricField g_;
  FiberKind kind_;
  double B_;
  int N_;
};

/// Prolongation bundle S²T* ⊕ T* ⊕ R of an Einstein metric. B is checked
/// against -Scal/(n(n-1)) and a non-Einstein metric is rejected with
/// BMismatchError.
[[nodiscard]] LinearConnectionBundle build_prolongation(const MetricField& g, double B, const CheckOptions& opt = {});

/// Section components of a solution triple in the prolongation fiber order.
[[nodiscard]] std::vector<Expr> prolongation_section(const SolutionTriple& s);
/// Packed components of a symmetric (0,2) tensor.
[[nodiscard]] std::vector<Expr> sym2_section(const TensorField& t);

/// max |∂_i s + A_i s| over trial points.
[[nodiscard]] ResidualReport section_residual(const LinearConnectionBundle& bundle, const std::vector<Expr>& section,
                                              const CheckOptions& opt = {});

struct KernelOptions {
  int max_order = 3;
  std::size_t samples = 3;
  std::uint64_t seed = 0;
  double rank_tol = 1e-8;
};

struct LoopOptions {
  std::size_t loops_per_plane = 2;
  double size_fraction = 0.35;  // rectangle sides relative to the box widths
  double step = 0.02;           // RK4 step in the loop parameter
  std::uint64_t seed = 0;
  double rank_tol = 1e-8;
};

struct MobilityReport {
  std::string method;
  FiberKind fiber = FiberKind::prolongation;
  int N = 0;
  int D = 0;
  bool stabilized = false;
  int order = 0;                  // stabilization order
  std::vector<int> rank_sequence;  // worst-point rank per derivative order
  std::size_t samples = 0;         // sample points, or loops for transport
  double threshold = 0;            // absolute singular value cutoff at the worst point
  double spectral_gap = 0;         // smallest kept over largest dropped singular value
  double error_floor = 0;          // integration error estimate (transport only)

  Point basis_point;
  Eigen::MatrixXd kernel_basis;  // N x D orthonormal basis of the kernel at basis_point

  std::size_t known_count = 0;
  int known_rank = 0;
  std::vector<std::vector<double>> known_coefficients;  // in kernel_basis
  double known_residual = 0;  // largest distance of a known section from the kernel
  bool exact = false;         // known_rank == D

  std::optional<int> k;  // parallel one-forms
  std::optional<int> l;  // from dim Par^{0,2} = k(k+1)/2 + l
  std::optional<bool> counting_consistent;

  std::optional<SignatureClass> signature_class;
  std::optional<bool> in_admissible_list;
};

/// Upper bound on the dimension of parallel sections from the infinitesimal
/// holonomy: curvature K_ij = ∂_iA_j - ∂_jA_i + [A_i, A_j] and its covariant
/// derivatives up to max_order, at each sample point. D is the smallest
/// kernel over the points.
[[nodiscard]] MobilityReport kernel_dimension(const LinearConnectionBundle& bundle, const KernelOptions& opt = {});

/// Independent estimate from parallel transport around lassos based at the
/// chart centre: dim of the common fixed space of the holonomy matrices.
[[nodiscard]] MobilityReport loop_transport_dimension(const LinearConnectionBundle& bundle,
                                                      const LoopOptions& opt = {});

/// Dimension of parallel symmetric (0,2)-tensors, with k and the inferred l.
[[nodiscard]] MobilityReport parallel_tensor_dimension(const MetricField& g, const KernelOptions& opt = {},
                                                       std::optional<int> expected_l = std::nullopt);
[[nodiscard]] MobilityReport parallel_oneform_dimension(const MetricField& g, const KernelOptions& opt = {});
[[nodiscard]] MobilityReport parallel_vector_dimension(const MetricField& g, const KernelOptions& opt = {});

/// Degree of mobility of an Einstein metric, matched against known
/// solutions and the admissible values for its signature class.
[[nodiscard]] MobilityReport mobility_of_metric(const MetricField& g, const std::vector<SolutionTriple>& known,
                                                const KernelOptions& opt = {});

/// Attaches known sections to a report: their rank over several points,
/// coefficients in the kernel basis, and exactness.
void match_known(MobilityReport& rep, const LinearConnectionBundle& bundle,
                 const std::vector<std::vector<Expr>>& sections, std::size_t points = 4);

}  // namespace einmob
