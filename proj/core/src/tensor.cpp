#include "einmob/tensor.hpp"

#include <stdexcept>

namespace einmob {

namespace {

std::size_t ipow(int n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

}  // namespace

TensorField::TensorField(Chart chart, int up, int down)
    : chart_(std::move(chart)), up_(up), down_(down), comps_(ipow(chart_.dimension(), up + down)) {
  if (up < 0 || down < 0) throw std::invalid_argument("negative tensor valence");
  refresh_symmetry();
}

TensorField::TensorField(Chart chart, int up, int down, std::vector<Expr> components)
    : chart_(std::move(chart)), up_(up), down_(down), comps_(std::move(components)) {
  if (comps_.size() != ipow(chart_.dimension(), up + down)) {
    throw std::invalid_argument("tensor component count does not match valence");
  }
  for (auto& c : comps_) c = normalize(c);
  refresh_symmetry();
}

TensorField TensorField::scalar(Chart chart, Expr value) { return TensorField(std::move(chart), 0, 0, {std::move(value)}); }

TensorField TensorField::vector(Chart chart, std::vector<Expr> components) {
  return TensorField(std::move(chart), 1, 0, std::move(components));
}

TensorField TensorField::one_form(Chart chart, std::vector<Expr> components) {
  return TensorField(std::move(chart), 0, 1, std::move(components));
}

TensorField TensorField::symmetric(Chart chart, std::vector<Expr> components) {
  TensorField t(std::move(chart), 0, 2, std::move(components));
  if (!t.symmetric_) throw std::invalid_argument("components are not symmetric");
  return t;
}

void TensorField::refresh_symmetry() {
  symmetric_ = false;
  if (up_ != 0 || down_ != 2) return;
  int n = dimension();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!(comps_[static_cast<std::size_t>(i * n + j)] == comps_[static_cast<std::size_t>(j * n + i)])) return;
    }
  }
  symmetric_ = true;
}

std::size_t TensorField::flat_index(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank()) throw std::out_of_range("wrong number of tensor indices");
  std::size_t k = 0;
  int n = dimension();
  for (int i : idx) {
    if (i < 0 || i >= n) throw std::out_of_range("tensor index out of range");
    k = k * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  }
  return k;
}

const Expr& TensorField::operator[](std::initializer_list<int> idx) const {
  return comps_[flat_index(std::span<const int>(idx.begin(), idx.size()))];
}

void TensorField::set(std::span<const int> idx, Expr v) {
  comps_[flat_index(idx)] = normalize(v);
  if (symmetric_ || (up_ == 0 && down_ == 2)) refresh_symmetry();
}

TensorField& TensorField::operator+=(const TensorField& o) {
  if (o.up_ != up_ || o.down_ != down_ || o.dimension() != dimension()) {
    throw std::invalid_argument("tensor valence mismatch");
  }
  for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] = comps_[i] + o.comps_[i];
  refresh_symmetry();
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  if (o.up_ != up_ || o.down_ != down_ || o.dimension() != dimension()) {
    throw std::invalid_argument("tensor valence mismatch");
  }
  for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] = comps_[i] - o.comps_[i];
  refresh_symmetry();
  return *this;
}

TensorField operator*(const Expr& s, const TensorField& t) {
  TensorField out = t;
  for (auto& c : out.comps_) c = s * c;
  out.refresh_symmetry();
  return out;
}

std::vector<double> TensorField::values(const Point& p) const { return chart_.compile(comps_).evaluate(p); }

TensorField tensor_product(const TensorField& a, const TensorField& b) {
  if (a.up() != 0 || a.down() != 1 || b.up() != 0 || b.down() != 1) {
    throw std::invalid_argument("tensor_product expects one-forms");
  }
  int n = a.dimension();
  std::vector<Expr> c(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(i * n + j)] = a.component(i) * b.component(j);
  }
  return TensorField(a.chart(), 0, 2, std::move(c));
}

TensorField symmetric_product(const TensorField& a, const TensorField& b) {
  return tensor_product(a, b) + tensor_product(b, a);
}

}  // namespace einmob
