#include "einmob/tensor_calculus.hpp"

#include <cmath>

#include "einmob/calculus.hpp"

namespace einmob {

namespace {

double combine(const std::vector<double>& terms) {
  double s = 0;
  for (double t : terms) s += t;
  return s;
}

Expr combine(const std::vector<Expr>& terms) { return sum(terms); }

bool skip(double v) { return v == 0.0; }
bool skip(const Expr& e) { return e.is_zero(); }

// Shared index gymnastics for ∇T. comp(flat) gives T, dcomp(flat, k) gives
// ∂_k T and gam(a, i, c) gives Γ^a_{ic}.
template <typename S, typename Comp, typename DComp, typename Gam>
std::vector<S> covariant_impl(int n, int up, int down, Comp comp, DComp dcomp, Gam gam) {
  const int rank = up + down;
  std::vector<S> out;
  std::vector<int> src(static_cast<std::size_t>(rank));
  auto flat = [&](const std::vector<int>& idx) {
    std::size_t f = 0;
    for (int i : idx) f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    return f;
  };
  for_each_index(n, rank + 1, [&](std::span<const int> idx) {
    const int k = idx[static_cast<std::size_t>(rank)];
    for (int s = 0; s < rank; ++s) src[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(s)];
    std::vector<S> terms;
    const std::size_t base = flat(src);
    S d = dcomp(base, k);
    if (!skip(d)) terms.push_back(d);
    for (int s = 0; s < rank; ++s) {
      const int orig = src[static_cast<std::size_t>(s)];
      for (int m = 0; m < n; ++m) {
        src[static_cast<std::size_t>(s)] = m;
        S c = comp(flat(src));
        if (skip(c)) continue;
        if (s < up) {
          S gm = gam(orig, k, m);
          if (!skip(gm)) terms.push_back(gm * c);
        } else {
          S gm = gam(m, k, orig);
          if (!skip(gm)) terms.push_back(-(gm * c));
        }
      }
      src[static_cast<std::size_t>(s)] = orig;
    }
    out.push_back(combine(terms));
  });
  return out;
}

}  // namespace

TensorField covariant_derivative(const TensorField& t, const CurvatureSet& cs) {
  const int n = t.dimension();
  const Chart& chart = t.chart();
  std::vector<std::vector<Expr>> dcache(t.components().size());
  auto comps = covariant_impl<Expr>(
      n, t.up(), t.down(), [&](std::size_t f) { return t.component(f); },
      [&](std::size_t f, int k) {
        auto& row = dcache[f];
        if (row.empty()) {
          for (int v = 0; v < n; ++v) row.push_back(chart.derivative(t.component(f), v));
        }
        return row[static_cast<std::size_t>(k)];
      },
      [&](int a, int i, int c) { return cs.christoffel(a, i, c); });
  return TensorField(chart, t.up(), t.down() + 1, std::move(comps));
}

TensorField covariant_derivative(const TensorField& t, const MetricField& g) {
  if (t.dimension() != g.dimension() || t.chart().coordinates() != g.chart().coordinates()) {
    throw std::invalid_argument("tensor and metric live on different charts");
  }
  return covariant_derivative(t, christoffels(g));
}

TensorField lie_derivative_metric(const TensorField& v, const MetricField& g) {
  if (v.up() != 1 || v.down() != 0) throw std::invalid_argument("lie_derivative_metric expects a vector field");
  if (v.chart().coordinates() != g.chart().coordinates()) throw std::invalid_argument("chart mismatch");
  const int n = g.dimension();
  const Chart& chart = g.chart();
  std::vector<Expr> out(static_cast<std::size_t>(n * n));
  std::vector<std::vector<Expr>> dv(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) dv[static_cast<std::size_t>(k)].push_back(chart.derivative(v.component(static_cast<std::size_t>(k)), i));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<Expr> terms;
      for (int k = 0; k < n; ++k) {
        const Expr& vk = v.component(static_cast<std::size_t>(k));
        if (!vk.is_zero()) terms.push_back(vk * chart.derivative(g(i, j), k));
        terms.push_back(g(k, j) * dv[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
        terms.push_back(g(i, k) * dv[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
      }
      Expr e = sum(terms);
      out[static_cast<std::size_t>(i * n + j)] = e;
      out[static_cast<std::size_t>(j * n + i)] = e;
    }
  }
  return TensorField(chart, 0, 2, std::move(out));
}

TensorField lower_index(const TensorField& t, const MetricField& g, int slot) {
  if (slot < 0 || slot >= t.up()) throw std::out_of_range("no such contravariant slot");
  const int n = t.dimension();
  TensorField out(t.chart(), t.up() - 1, t.down() + 1);
  std::vector<int> src(static_cast<std::size_t>(t.rank()));
  for_each_index(n, t.rank(), [&](std::span<const int> idx) {
    // idx = (remaining uppers..., lowered, lowers...)
    const int lowered = idx[static_cast<std::size_t>(t.up() - 1)];
    int w = 0;
    for (int s = 0; s < t.up(); ++s) {
      if (s == slot) continue;
      src[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(w++)];
    }
    for (int s = 0; s < t.down(); ++s) src[static_cast<std::size_t>(t.up() + s)] = idx[static_cast<std::size_t>(t.up() + s)];
    std::vector<Expr> terms;
    for (int m = 0; m < n; ++m) {
      src[static_cast<std::size_t>(slot)] = m;
      const Expr& gm = g(lowered, m);
      if (gm.is_zero()) continue;
      terms.push_back(gm * t.at(src));
    }
    out.set(idx, sum(terms));
  });
  out.refresh_symmetry();
  return out;
}

TensorField raise_index(const TensorField& t, const MetricField& g, int slot) {
  if (slot < 0 || slot >= t.down()) throw std::out_of_range("no such covariant slot");
  const int n = t.dimension();
  TensorField out(t.chart(), t.up() + 1, t.down() - 1);
  std::vector<int> src(static_cast<std::size_t>(t.rank()));
  for_each_index(n, t.rank(), [&](std::span<const int> idx) {
    // idx = (uppers..., raised, remaining lowers...)
    const int raised = idx[static_cast<std::size_t>(t.up())];
    for (int s = 0; s < t.up(); ++s) src[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(s)];
    int w = t.up() + 1;
    for (int s = 0; s < t.down(); ++s) {
      if (s == slot) continue;
      src[static_cast<std::size_t>(t.up() + s)] = idx[static_cast<std::size_t>(w++)];
    }
    std::vector<Expr> terms;
    for (int m = 0; m < n; ++m) {
      src[static_cast<std::size_t>(t.up() + slot)] = m;
      const Expr& gm = g.inverse(raised, m);
      if (gm.is_zero()) continue;
      terms.push_back(gm * t.at(src));
    }
    out.set(idx, sum(terms));
  });
  return out;
}

Expr trace(const TensorField& t, const MetricField& g) {
  if (t.up() != 0 || t.down() != 2) throw std::invalid_argument("trace expects a (0,2) tensor");
  const int n = g.dimension();
  std::vector<Expr> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Expr& inv = g.inverse(i, j);
      if (inv.is_zero()) continue;
      terms.push_back(inv * t[{i, j}]);
    }
  }
  return sum(terms);
}

TensorField gradient_form(const Expr& f, const Chart& chart) {
  std::vector<Expr> c;
  for (int i = 0; i < chart.dimension(); ++i) c.push_back(chart.derivative(f, i));
  return TensorField::one_form(chart, std::move(c));
}

Expr inner(const TensorField& x, const TensorField& y, const MetricField& g) {
  const int n = g.dimension();
  std::vector<Expr> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g(i, j).is_zero()) continue;
      terms.push_back(g(i, j) * x.component(static_cast<std::size_t>(i)) * y.component(static_cast<std::size_t>(j)));
    }
  }
  return sum(terms);
}

std::vector<double> covariant_derivative_values(const TensorField& t, const MetricField& g, const Point& p) {
  const int n = g.dimension();
  auto jets = t.chart().compile(t.components()).evaluate_jet(p, 1);
  MetricJet mj = g.jet(p, 1);
  std::vector<Eigen::MatrixXd> gam;
  for (const auto& m : mj.gamma) gam.push_back(m.value());
  return covariant_impl<double>(
      n, t.up(), t.down(), [&](std::size_t f) { return jets[f].value(); },
      [&](std::size_t f, int k) { return jets[f].coefficients()[static_cast<std::size_t>(1 + k)]; },
      [&](int a, int i, int c) { return gam[static_cast<std::size_t>(i)](a, c); });
}

std::vector<double> lie_derivative_metric_values(const TensorField& v, const MetricField& g, const Point& p) {
  const int n = g.dimension();
  auto vj = v.chart().compile(v.components()).evaluate_jet(p, 1);
  MetricJet mj = g.jet(p, 1);
  std::vector<double> out(static_cast<std::size_t>(n * n));
  auto d = [](const Jet& j, int k) { return j.coefficients()[static_cast<std::size_t>(1 + k)]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k) {
        if (mj.g.nonzero(i, j)) s += vj[static_cast<std::size_t>(k)].value() * d(mj.g.at(i, j), k);
        if (mj.g.nonzero(k, j)) s += mj.g.at(k, j).value() * d(vj[static_cast<std::size_t>(k)], i);
        if (mj.g.nonzero(i, k)) s += mj.g.at(i, k).value() * d(vj[static_cast<std::size_t>(k)], j);
      }
      out[static_cast<std::size_t>(i * n + j)] = s;
    }
  }
  return out;
}

void ResidualReport::merge(const ResidualReport& o) {
  if (o.max_abs >= max_abs) {
    max_abs = o.max_abs;
    witness = o.witness;
  }
  scale = std::max(scale, o.scale);
  trials += o.trials;
}

ResidualReport sample_residual(const Chart& chart, const CheckOptions& opt,
                               const std::function<std::pair<std::vector<double>, double>(const Point&)>& f) {
  ResidualReport rep;
  for (const auto& p : chart.sample(opt.trials, opt.seed)) {
    auto [res, scale] = f(p);
    ++rep.trials;
    rep.scale = std::max(rep.scale, scale);
    for (double r : res) {
      if (std::fabs(r) > rep.max_abs || rep.witness.empty()) {
        rep.max_abs = std::max(rep.max_abs, std::fabs(r));
        rep.witness = p;
      }
    }
  }
  return rep;
}

ResidualReport zero_residual(const std::vector<Expr>& components, const Chart& chart, const CheckOptions& opt) {
  Program prog = chart.compile(components);
  return sample_residual(chart, opt, [&](const Point& p) {
    double scale = 0;
    auto v = prog.evaluate(p, &scale);
    return std::make_pair(v, scale);
  });
}

ResidualReport parallel_residual(const TensorField& t, const MetricField& g, const CheckOptions& opt) {
  return sample_residual(g.chart(), opt, [&](const Point& p) {
    auto v = covariant_derivative_values(t, g, p);
    double scale = 0;
    for (double x : t.values(p)) scale = std::max(scale, std::fabs(x));
    return std::make_pair(v, scale);
  });
}

}  // namespace einmob
