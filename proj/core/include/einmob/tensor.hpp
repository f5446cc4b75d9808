#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "einmob/chart.hpp"
#include "einmob/expr.hpp"

namespace einmob {

/// Tensor field of valence (up, down) on a chart. Components are stored in
/// row-major order over the index tuple (contravariant indices first).
class TensorField {
 public:
  TensorField() = default;
  TensorField(Chart chart, int up, int down);
  TensorField(Chart chart, int up, int down, std::vector<Expr> components);

  static TensorField scalar(Chart chart, Expr value);
  static TensorField vector(Chart chart, std::vector<Expr> components);
  static TensorField one_form(Chart chart, std::vector<Expr> components);
  /// Symmetric (0,2) tensor from a full n*n row-major array; throws unless
  /// the array is structurally symmetric.
  static TensorField symmetric(Chart chart, std::vector<Expr> components);

  [[nodiscard]] const Chart& chart() const { return chart_; }
  [[nodiscard]] int dimension() const { return chart_.dimension(); }
  [[nodiscard]] int up() const { return up_; }
  [[nodiscard]] int down() const { return down_; }
  [[nodiscard]] int rank() const { return up_ + down_; }
  [[nodiscard]] bool is_symmetric() const { return symmetric_; }

  [[nodiscard]] const std::vector<Expr>& components() const { return comps_; }
  [[nodiscard]] std::size_t flat_index(std::span<const int> idx) const;
  [[nodiscard]] const Expr& operator[](std::initializer_list<int> idx) const;
  [[nodiscard]] const Expr& at(std::span<const int> idx) const { return comps_[flat_index(idx)]; }
  void set(std::span<const int> idx, Expr v);
  void set(std::initializer_list<int> idx, Expr v) { set(std::span<const int>(idx.begin(), idx.size()), std::move(v)); }
  [[nodiscard]] const Expr& component(std::size_t flat) const { return comps_[flat]; }

  /// Recomputes the symmetry flag from the components.
  void refresh_symmetry();

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(const Expr& s, const TensorField& t);

  /// Numeric component values at a point.
  [[nodiscard]] std::vector<double> values(const Point& p) const;

 private:
  Chart chart_;
  int up_ = 0;
  int down_ = 0;
  bool symmetric_ = false;
  std::vector<Expr> comps_;
};

/// Iterates over all index tuples of length `rank` in row-major order.
template <typename F>
void for_each_index(int n, int rank, F&& f) {
  std::vector<int> idx(rank, 0);
  while (true) {
    f(std::span<const int>(idx));
    int k = rank - 1;
    while (k >= 0 && ++idx[k] == n) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) return;
  }
}

/// Symmetric product a⊙b = a⊗b + b⊗a of two one-forms.
[[nodiscard]] TensorField symmetric_product(const TensorField& a, const TensorField& b);
/// Tensor product of two one-forms, a⊗b.
[[nodiscard]] TensorField tensor_product(const TensorField& a, const TensorField& b);

}  // namespace einmob
