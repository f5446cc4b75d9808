#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "einmob/chart.hpp"
#include "einmob/matjet.hpp"
#include "einmob/tensor.hpp"

namespace einmob {

class DegenerateMetricError : public std::runtime_error {
 public:
  DegenerateMetricError(const std::string& what, Point where) : std::runtime_error(what), where_(std::move(where)) {}
  [[nodiscard]] const Point& where() const { return where_; }

 private:
  Point where_;
};

struct MetricOptions {
  std::size_t node_budget = 1'000'000;
  std::size_t max_symbolic_block = 6;
  std::size_t nondegeneracy_trials = 20;
  bool symbolic = true;
};

/// Taylor data of a metric at a point: g, its inverse and the Christoffel
/// matrices gamma[i](a, c) = Γ^a_{ic}.
struct MetricJet {
  Point point;
  int order = 0;
  std::shared_ptr<const JetSpace> space;
  MatJet g;
  MatJet ginv;
  std::vector<MatJet> gamma;  // order - 1
};

/// Pseudo-Riemannian metric g_ij on a chart.
///
/// The inverse and determinant are computed symbolically block by block
/// (blocks are the connected components of the sparsity pattern). When a
/// block is too large or the result exceeds the node budget, the metric is
/// numeric-only: symbolic tensor operations are unavailable but every
/// numeric check still works from Taylor jets of g.
class MetricField {
 public:
  MetricField() = default;
  MetricField(Chart chart, std::vector<Expr> components, MetricOptions options = {});

  static MetricField diagonal(Chart chart, const std::vector<Expr>& entries, MetricOptions options = {});

  [[nodiscard]] const Chart& chart() const { return data_->chart; }
  [[nodiscard]] int dimension() const { return data_->chart.dimension(); }
  [[nodiscard]] const Expr& operator()(int i, int j) const { return data_->g[idx(i, j)]; }
  [[nodiscard]] const std::vector<Expr>& components() const { return data_->g; }
  [[nodiscard]] TensorField as_tensor() const { return TensorField(chart(), 0, 2, data_->g); }

  [[nodiscard]] bool has_symbolic_inverse() const { return data_->has_inverse; }
  /// g^{ij}; throws std::logic_error for numeric-only metrics.
  [[nodiscard]] const Expr& inverse(int i, int j) const;
  [[nodiscard]] const Expr& determinant() const;
  [[nodiscard]] const std::vector<std::vector<int>>& blocks() const { return data_->blocks; }

  [[nodiscard]] Eigen::MatrixXd value(const Point& p) const;
  [[nodiscard]] MetricJet jet(const Point& p, int order) const;

  [[nodiscard]] const Program& program() const { return data_->program; }

 private:
  struct Data {
    Chart chart;
    std::vector<Expr> g;
    std::vector<Expr> ginv;
    Expr det;
    bool has_inverse = false;
    std::vector<std::vector<int>> blocks;
    Program program;  // lower triangle, row by row
  };
  [[nodiscard]] std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(dimension()) + static_cast<std::size_t>(j);
  }
  std::shared_ptr<const Data> data_;
};

/// Symbolic determinant and adjugate-based inverse of a small dense matrix.
/// Returns false if the determinant normalizes to zero.
bool symbolic_inverse(const std::vector<Expr>& m, int n, std::vector<Expr>& inverse, Expr& det);

/// Connected components of the off-diagonal sparsity pattern of m.
[[nodiscard]] std::vector<std::vector<int>> sparsity_blocks(const std::vector<Expr>& m, int n);

/// Block-wise symbolic inverse and determinant of a symmetric matrix.
/// Returns false if a block is larger than `max_block`, singular, or the
/// inverse exceeds `node_budget` nodes.
bool block_inverse(const std::vector<Expr>& m, int n, std::vector<Expr>& inverse, Expr& det,
                   std::size_t max_block = 6, std::size_t node_budget = 1'000'000);

}  // namespace einmob
