#include "einmob/metric.hpp"

#include <cmath>
#include <algorithm>
#include <map>

namespace einmob {

namespace {

// Determinants of the leading rows against every column subset.
std::vector<Expr> minors_over_rows(const std::vector<Expr>& m, int n, const std::vector<int>& rows) {
  const int k = static_cast<int>(rows.size());
  std::vector<Expr> f(static_cast<std::size_t>(1) << n);
  f[0] = Expr(1);
  std::vector<char> valid(f.size(), 0);
  valid[0] = 1;
  for (unsigned mask = 1; mask < f.size(); ++mask) {
    int size = __builtin_popcount(mask);
    if (size > k) continue;
    int r = rows[static_cast<std::size_t>(size - 1)];
    std::vector<Expr> terms;
    for (int j = 0; j < n; ++j) {
      if (!(mask & (1u << j))) continue;
      const Expr& a = m[static_cast<std::size_t>(r * n + j)];
      if (a.is_zero()) continue;
      unsigned rest = mask & ~(1u << j);
      if (!valid[rest] || f[rest].is_zero()) continue;
      int greater = __builtin_popcount(mask >> (j + 1));
      Expr t = a * f[rest];
      terms.push_back(greater % 2 ? -t : t);
    }
    f[mask] = sum(terms);
    valid[mask] = 1;
  }
  return f;
}

}  // namespace

bool symbolic_inverse(const std::vector<Expr>& m, int n, std::vector<Expr>& inverse, Expr& det) {
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  const unsigned full = (1u << n) - 1;
  det = minors_over_rows(m, n, all)[full];
  if (det.is_zero()) return false;
  Expr inv_det = pow(det, Rational(-1));
  inverse.assign(static_cast<std::size_t>(n * n), Expr(0));
  if (n == 1) {
    inverse[0] = inv_det;
    return true;
  }
  for (int j = 0; j < n; ++j) {
    std::vector<int> rows;
    for (int r = 0; r < n; ++r) {
      if (r != j) rows.push_back(r);
    }
    auto f = minors_over_rows(m, n, rows);
    for (int i = 0; i < n; ++i) {
      Expr minor = f[full & ~(1u << i)];
      if (minor.is_zero()) continue;
      Expr c = minor * inv_det;
      inverse[static_cast<std::size_t>(i * n + j)] = (i + j) % 2 ? -c : c;
    }
  }
  return true;
}

std::vector<std::vector<int>> sparsity_blocks(const std::vector<Expr>& m, int n) {
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!m[static_cast<std::size_t>(i * n + j)].is_zero() || !m[static_cast<std::size_t>(j * n + i)].is_zero()) {
        int a = find(i);
        int b = find(j);
        if (a != b) parent[static_cast<std::size_t>(a)] = b;
      }
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  std::sort(out.begin(), out.end());
  return out;
}

bool block_inverse(const std::vector<Expr>& m, int n, std::vector<Expr>& inverse, Expr& det, std::size_t max_block,
                   std::size_t node_budget) {
  std::vector<Expr> ginv(static_cast<std::size_t>(n * n), Expr(0));
  std::vector<Expr> dets;
  for (const auto& b : sparsity_blocks(m, n)) {
    if (b.size() > max_block) return false;
    int k = static_cast<int>(b.size());
    std::vector<Expr> sub(static_cast<std::size_t>(k * k));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) sub[static_cast<std::size_t>(i * k + j)] = m[static_cast<std::size_t>(b[i] * n + b[j])];
    }
    std::vector<Expr> inv;
    Expr bdet;
    if (!symbolic_inverse(sub, k, inv, bdet)) return false;
    dets.push_back(bdet);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) ginv[static_cast<std::size_t>(b[i] * n + b[j])] = inv[static_cast<std::size_t>(i * k + j)];
    }
  }
  std::size_t nodes = 0;
  for (const auto& e : ginv) nodes += e.node_count();
  if (nodes > node_budget) return false;
  inverse = std::move(ginv);
  det = product(dets);
  return true;
}

MetricField MetricField::diagonal(Chart chart, const std::vector<Expr>& entries, MetricOptions options) {
  int n = chart.dimension();
  if (static_cast<int>(entries.size()) != n) throw std::invalid_argument("diagonal metric needs one entry per coordinate");
  std::vector<Expr> g(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i * n + i)] = entries[static_cast<std::size_t>(i)];
  return MetricField(std::move(chart), std::move(g), options);
}

MetricField::MetricField(Chart chart, std::vector<Expr> components, MetricOptions options) {
  auto d = std::make_shared<Data>();
  d->chart = std::move(chart);
  const int n = d->chart.dimension();
  if (components.size() != static_cast<std::size_t>(n * n)) {
    throw std::invalid_argument("metric needs n*n components");
  }
  for (auto& c : components) c = normalize(c);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!(components[static_cast<std::size_t>(i * n + j)] == components[static_cast<std::size_t>(j * n + i)])) {
        throw std::invalid_argument("metric components are not symmetric");
      }
    }
  }
  d->g = std::move(components);

  std::vector<Expr> lower;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) lower.push_back(d->g[static_cast<std::size_t>(i * n + j)]);
  }
  d->program = d->chart.compile(lower);

  d->blocks = sparsity_blocks(d->g, n);

  // Nondegeneracy at trial points.
  for (const auto& p : d->chart.sample(options.nondegeneracy_trials, 0x5eed)) {
    Eigen::MatrixXd gv = Eigen::MatrixXd::Zero(n, n);
    auto vals = d->program.evaluate(p);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) gv(i, j) = gv(j, i) = vals[k++];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gv, Eigen::EigenvaluesOnly);
    double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    double smallest = es.eigenvalues().cwiseAbs().minCoeff();
    if (!(smallest > 1e-10 * norm)) throw DegenerateMetricError("metric is degenerate at a trial point", p);
  }

  if (options.symbolic) {
    d->has_inverse = block_inverse(d->g, n, d->ginv, d->det, options.max_symbolic_block, options.node_budget);
  }
  data_ = std::move(d);
}

const Expr& MetricField::inverse(int i, int j) const {
  if (!data_->has_inverse) throw std::logic_error("metric has no symbolic inverse (numeric-only mode)");
  return data_->ginv[idx(i, j)];
}

const Expr& MetricField::determinant() const {
  if (!data_->has_inverse) throw std::logic_error("metric has no symbolic determinant (numeric-only mode)");
  return data_->det;
}

Eigen::MatrixXd MetricField::value(const Point& p) const {
  const int n = dimension();
  Eigen::MatrixXd gv(n, n);
  auto vals = data_->program.evaluate(p);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) gv(i, j) = gv(j, i) = vals[k++];
  }
  return gv;
}

MetricJet MetricField::jet(const Point& p, int order) const {
  if (order < 1) throw std::invalid_argument("metric jet needs order >= 1");
  const int n = dimension();
  MetricJet mj;
  mj.point = p;
  mj.order = order;
  mj.space = JetSpace::get(n, order);
  const JetSpace* space = mj.space.get();
  auto jets = data_->program.evaluate_jet(p, order);
  mj.g = MatJet(space, order, n, n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      Jet& v = jets[k++];
      if (v.is_zero()) continue;
      mj.g.set(i, j, v);
      if (i != j) mj.g.set(j, i, v);
    }
  }
  Eigen::MatrixXd g0 = mj.g.value();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g0, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().cwiseAbs().minCoeff() > 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff())) {
    throw DegenerateMetricError("metric is degenerate at the evaluation point", p);
  }
  mj.ginv = einmob::inverse(mj.g);

  // dg[c](a,b) = d_c g_ab
  std::vector<MatJet> dg;
  dg.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) dg.push_back(mj.g.derivative(c));
  // Lowered symbols Γ_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij), stored per i as (l, j).
  std::vector<MatJet> lowered;
  for (int i = 0; i < n; ++i) {
    MatJet low(space, order - 1, n, n);
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) {
        Jet acc(space, order - 1);
        bool any = false;
        if (dg[i].nonzero(j, l)) {
          acc += dg[i].at(j, l);
          any = true;
        }
        if (dg[j].nonzero(i, l)) {
          acc += dg[j].at(i, l);
          any = true;
        }
        if (dg[l].nonzero(i, j)) {
          acc -= dg[l].at(i, j);
          any = true;
        }
        if (any && !acc.is_zero()) low.set(l, j, acc * 0.5);
      }
    }
    lowered.push_back(std::move(low));
  }
  MatJet ginv = mj.ginv.truncated(order - 1);
  for (int i = 0; i < n; ++i) mj.gamma.push_back(ginv * lowered[static_cast<std::size_t>(i)]);
  return mj;
}

}  // namespace einmob
