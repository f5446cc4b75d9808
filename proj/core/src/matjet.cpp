#include "einmob/matjet.hpp"

#include <algorithm>
#include <stdexcept>

namespace einmob {

MatJet MatJet::constant(const JetSpace* space, int order, const Eigen::MatrixXd& m) {
  MatJet out(space, order, static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < out.rows_; ++i) {
    for (int j = 0; j < out.cols_; ++j) {
      if (m(i, j) != 0.0) out.set(i, j, Jet::constant(space, order, m(i, j)));
    }
  }
  return out;
}

Jet& MatJet::ref(int i, int j) {
  auto k = idx(i, j);
  if (!nz_[k]) {
    e_[k] = Jet(space_, order_);
    nz_[k] = 1;
  }
  return e_[k];
}

void MatJet::set(int i, int j, Jet v) {
  auto k = idx(i, j);
  if (v.order() > order_) v = v.truncated(order_);
  e_[k] = std::move(v);
  nz_[k] = 1;
}

Eigen::MatrixXd MatJet::value() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      if (nonzero(i, j)) m(i, j) = at(i, j).value();
    }
  }
  return m;
}

MatJet MatJet::derivative(int var) const {
  if (order_ < 1) throw std::logic_error("derivative of an order-0 matrix jet");
  MatJet out(space_, order_ - 1, rows_, cols_);
  for (std::size_t k = 0; k < e_.size(); ++k) {
    if (!nz_[k]) continue;
    Jet d = e_[k].derivative(var);
    if (!d.is_zero()) {
      out.e_[k] = std::move(d);
      out.nz_[k] = 1;
    }
  }
  return out;
}

MatJet MatJet::truncated(int order) const {
  MatJet out = *this;
  out.lower_order(order);
  return out;
}

void MatJet::lower_order(int order) {
  if (order >= order_) return;
  for (std::size_t k = 0; k < e_.size(); ++k) {
    if (nz_[k]) e_[k] = e_[k].truncated(order);
  }
  order_ = order;
}

MatJet& MatJet::operator+=(const MatJet& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("matrix jet shape mismatch");
  lower_order(o.order_);
  for (std::size_t k = 0; k < e_.size(); ++k) {
    if (!o.nz_[k]) continue;
    if (nz_[k]) {
      e_[k] += o.e_[k];
    } else {
      e_[k] = o.e_[k].truncated(order_);
      nz_[k] = 1;
    }
  }
  return *this;
}

MatJet& MatJet::operator-=(const MatJet& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("matrix jet shape mismatch");
  lower_order(o.order_);
  for (std::size_t k = 0; k < e_.size(); ++k) {
    if (!o.nz_[k]) continue;
    if (nz_[k]) {
      e_[k] -= o.e_[k];
    } else {
      e_[k] = -o.e_[k].truncated(order_);
      nz_[k] = 1;
    }
  }
  return *this;
}

MatJet& MatJet::operator*=(double s) {
  for (std::size_t k = 0; k < e_.size(); ++k) {
    if (nz_[k]) e_[k] *= s;
  }
  return *this;
}

void MatJet::add_product(const MatJet& a, const MatJet& b, double s) {
  if (a.cols_ != b.rows_ || a.rows_ != rows_ || b.cols_ != cols_) {
    throw std::invalid_argument("matrix jet shape mismatch in product");
  }
  lower_order(std::min(a.order_, b.order_));
  for (int i = 0; i < a.rows_; ++i) {
    for (int k = 0; k < a.cols_; ++k) {
      if (!a.nonzero(i, k)) continue;
      const Jet& aik = a.at(i, k);
      for (int j = 0; j < b.cols_; ++j) {
        if (!b.nonzero(k, j)) continue;
        ref(i, j).add_product(aik, b.at(k, j), s);
      }
    }
  }
}

MatJet operator*(const MatJet& a, const MatJet& b) {
  MatJet out(a.space_, std::min(a.order_, b.order_), a.rows_, b.cols_);
  out.add_product(a, b);
  return out;
}

MatJet commutator(const MatJet& a, const MatJet& b) {
  MatJet out(a.space(), std::min(a.order(), b.order()), a.rows(), b.cols());
  out.add_product(a, b, 1.0);
  out.add_product(b, a, -1.0);
  return out;
}

MatJet inverse(const MatJet& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of a non-square matrix jet");
  Eigen::MatrixXd v = m.value();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  if (!lu.isInvertible()) throw std::domain_error("singular matrix jet");
  Eigen::MatrixXd inv0 = lu.inverse();
  int order = m.order();
  MatJet c = MatJet::constant(m.space(), order, inv0);
  // step = -inv0 * (m - m(x0)), which has no constant term.
  MatJet delta = m;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (delta.nonzero(i, j)) delta.ref(i, j).coefficients()[0] = 0.0;
    }
  }
  MatJet step(m.space(), order, m.rows(), m.cols());
  step.add_product(c, delta, -1.0);
  MatJet result = c;
  MatJet term = c;
  for (int k = 1; k <= order; ++k) {
    term = step * term;
    result += term;
  }
  return result;
}

}  // namespace einmob
