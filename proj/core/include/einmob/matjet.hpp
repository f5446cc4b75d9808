#pragma once

#include <Eigen/Dense>
#include <vector>

#include "einmob/jet.hpp"

namespace einmob {

/// Matrix whose entries are jets over a common JetSpace. Entries that are
/// known to vanish identically are flagged and skipped in products, which
/// keeps block-structured connections cheap.
class MatJet {
 public:
  MatJet() = default;
  MatJet(const JetSpace* space, int order, int rows, int cols)
      : space_(space), order_(order), rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols)),
        nz_(static_cast<std::size_t>(rows * cols), 0) {}

  static MatJet constant(const JetSpace* space, int order, const Eigen::MatrixXd& m);

  [[nodiscard]] const JetSpace* space() const { return space_; }
  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }

  [[nodiscard]] bool nonzero(int i, int j) const { return nz_[idx(i, j)] != 0; }
  [[nodiscard]] const Jet& at(int i, int j) const { return e_[idx(i, j)]; }
  /// Mutable access; marks the entry nonzero (allocating it if needed).
  Jet& ref(int i, int j);
  void set(int i, int j, Jet v);

  [[nodiscard]] Eigen::MatrixXd value() const;
  [[nodiscard]] MatJet derivative(int var) const;
  [[nodiscard]] MatJet truncated(int order) const;

  MatJet& operator+=(const MatJet& o);
  MatJet& operator-=(const MatJet& o);
  MatJet& operator*=(double s);
  friend MatJet operator+(MatJet a, const MatJet& b) { return a += b; }
  friend MatJet operator-(MatJet a, const MatJet& b) { return a -= b; }
  friend MatJet operator*(const MatJet& a, const MatJet& b);

  /// this += s * a * b, truncated to the lowest order involved.
  void add_product(const MatJet& a, const MatJet& b, double s = 1.0);

 private:
  [[nodiscard]] std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * cols_ + j); }
  void lower_order(int order);

  const JetSpace* space_ = nullptr;
  int order_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Jet> e_;
  std::vector<char> nz_;
};

/// [a, b] = ab - ba
[[nodiscard]] MatJet commutator(const MatJet& a, const MatJet& b);

/// Inverse of a matrix of jets via the Neumann series around its value.
[[nodiscard]] MatJet inverse(const MatJet& m);

}  // namespace einmob
