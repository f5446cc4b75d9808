#include "einmob/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "einmob/calculus.hpp"

namespace einmob {

namespace {

std::size_t at2(int n, int i, int j) { return static_cast<std::size_t>(i * n + j); }

Expr num(double x) { return Expr(rationalize(x)); }

Point slice(const Point& p, int from, int count) {
  return Point(p.begin() + from, p.begin() + from + count);
}

void merge_constants(std::map<std::string, double>& into, const std::map<std::string, double>& from) {
  for (const auto& [k, v] : from) {
    auto it = into.find(k);
    if (it != into.end() && it->second != v) throw ConstructionError("conflicting values for constant '" + k + "'");
    into[k] = v;
  }
}

// Block-diagonal metric on the product of the given charts; factor i is
// multiplied by scale[i].
MetricField block_sum(const std::string& name, const std::vector<MetricField>& factors,
                      const std::vector<Expr>& scale, std::vector<Expr> extra_excluded = {}) {
  std::vector<std::string> coords;
  std::vector<Interval> box;
  std::vector<Expr> excluded = std::move(extra_excluded);
  std::map<std::string, double> constants;
  std::set<std::string> seen;
  for (const auto& f : factors) {
    for (const auto& c : f.chart().coordinates()) {
      if (!seen.insert(c).second) throw ConstructionError("coordinate name clash: '" + c + "'");
      coords.push_back(c);
    }
    box.insert(box.end(), f.chart().box().begin(), f.chart().box().end());
    excluded.insert(excluded.end(), f.chart().excluded().begin(), f.chart().excluded().end());
    merge_constants(constants, f.chart().constants());
  }
  const int n = static_cast<int>(coords.size());
  std::vector<Expr> comps(static_cast<std::size_t>(n * n), Expr(0));
  int off = 0;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const int m = factors[f].dimension();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const Expr& e = factors[f](i, j);
        if (!e.is_zero()) comps[at2(n, off + i, off + j)] = scale[f] * e;
      }
    }
    off += m;
  }
  return MetricField(Chart(name, coords, box, excluded, constants), comps);
}

TensorField vector_on(const Chart& chart, std::vector<Expr> comps) { return TensorField::vector(chart, std::move(comps)); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConstructionError(what);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

ResidualReport cone_field_residual(const TensorField& xi, const MetricField& g, const CheckOptions& opt) {
  const int n = g.dimension();
  return sample_residual(g.chart(), opt, [&](const Point& p) {
    auto v = covariant_derivative_values(xi, g, p);
    std::vector<double> r(v.size());
    double scale = 1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        r[at2(n, i, j)] = v[at2(n, i, j)] - (i == j ? 1.0 : 0.0);
        scale = std::max(scale, std::fabs(v[at2(n, i, j)]));
      }
    }
    return std::make_pair(r, scale);
  });
}

Construction cone(const MetricField& g, int sign, const ConeOptions& opt) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("cone sign must be +1 or -1");
  const Chart& base = g.chart();
  for (const auto& c : base.coordinates()) {
    if (c == opt.radial) throw ConstructionError("radial coordinate '" + opt.radial + "' clashes with the base chart");
  }
  std::vector<std::string> coords{opt.radial};
  coords.insert(coords.end(), base.coordinates().begin(), base.coordinates().end());
  std::vector<Interval> box{opt.r_box};
  box.insert(box.end(), base.box().begin(), base.box().end());
  std::vector<Expr> excluded = base.excluded();
  Expr r = Expr::coordinate(opt.radial);
  excluded.push_back(r);
  Chart chart("cone(" + base.name() + ")", coords, box, excluded, base.constants());
  const int n = g.dimension();
  const int N = n + 1;
  std::vector<Expr> comps(static_cast<std::size_t>(N * N), Expr(0));
  comps[0] = Expr(sign);
  Expr r2 = r * r;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (!g(a, b).is_zero()) comps[at2(N, a + 1, b + 1)] = r2 * g(a, b);
    }
  }
  Construction out{MetricField(chart, comps), std::nullopt, std::nullopt};
  std::vector<Expr> xi(static_cast<std::size_t>(N), Expr(0));
  xi[0] = r;
  out.xi = vector_on(chart, xi);
  out.xi_residual = cone_field_residual(*out.xi, out.metric);
  require(out.xi_residual->within(1e-9), "cone field check failed: |∇ξ - Id| = " + fmt(out.xi_residual->max_abs));
  return out;
}

MetricField sign_flip(const MetricField& g) {
  std::vector<Expr> comps;
  for (const auto& e : g.components()) comps.push_back(e.is_zero() ? e : -e);
  return MetricField(g.chart(), comps);
}

MetricField rename_coordinates(const MetricField& g, const std::string& suffix) {
  std::map<std::string, Expr> rep;
  std::vector<std::string> coords;
  for (const auto& c : g.chart().coordinates()) {
    coords.push_back(c + suffix);
    rep[c] = Expr::coordinate(c + suffix);
  }
  std::vector<Expr> excluded;
  for (const auto& e : g.chart().excluded()) excluded.push_back(substitute(e, rep));
  Chart chart(g.chart().name() + suffix, coords, g.chart().box(), excluded, g.chart().constants());
  std::vector<Expr> comps;
  for (const auto& e : g.components()) comps.push_back(substitute(e, rep));
  return MetricField(chart, comps);
}

Construction flat_space(int k, const std::string& prefix, Interval box) {
  if (k < 1) throw std::invalid_argument("flat space needs dimension >= 1");
  std::vector<std::string> coords;
  for (int i = 0; i < k; ++i) coords.push_back(k == 1 ? prefix : prefix + std::to_string(i + 1));
  Chart chart("R" + std::to_string(k), coords, std::vector<Interval>(static_cast<std::size_t>(k), box));
  std::vector<Expr> ones(static_cast<std::size_t>(k), Expr(1));
  Construction out{MetricField::diagonal(chart, ones), std::nullopt, std::nullopt};
  std::vector<Expr> xi;
  for (int i = 0; i < k; ++i) xi.push_back(chart.coordinate(i));
  out.xi = vector_on(chart, xi);
  out.xi_residual = cone_field_residual(*out.xi, out.metric);
  return out;
}

Construction product(const Construction& a, const Construction& b) {
  Construction out{block_sum(a.metric.chart().name() + "x" + b.metric.chart().name(), {a.metric, b.metric},
                             {Expr(1), Expr(1)}),
                   std::nullopt, std::nullopt};
  if (a.xi && b.xi) {
    std::vector<Expr> xi = a.xi->components();
    xi.insert(xi.end(), b.xi->components().begin(), b.xi->components().end());
    out.xi = vector_on(out.metric.chart(), xi);
    out.xi_residual = cone_field_residual(*out.xi, out.metric);
    require(out.xi_residual->within(1e-9),
            "product cone field check failed: |∇ξ - Id| = " + fmt(out.xi_residual->max_abs));
  }
  return out;
}

Construction product(const MetricField& a, const MetricField& b) {
  return product(Construction{a, std::nullopt, std::nullopt}, Construction{b, std::nullopt, std::nullopt});
}

WarpedResult warped(const WarpedSpec& spec, const CheckOptions& opt) {
  const MetricField& h0 = spec.h0;
  const std::size_t m = spec.blocks.size();
  require(h0.dimension() == 2, "the Lorentzian block N0 must be 2-dimensional");
  require(m >= 2, "at least two Riemannian blocks are required");
  require(spec.rho.size() == m, "one constant rho per block is required");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) require(spec.rho[i] != spec.rho[j], "the constants rho must be distinct");
  }
  const Chart& c0 = h0.chart();
  SignatureCounts s0 = signature(h0, c0.center());
  require(s0.plus == 1 && s0.minus == 1, "h0 must be Lorentzian");

  // grad λ parallel and null on N0.
  TensorField dl = gradient_form(spec.lambda, c0);
  ResidualReport par = parallel_residual(dl, h0, opt);
  require(par.within(opt.tol), "grad lambda is not parallel on N0 (residual " + fmt(par.max_abs) + ")");
  ResidualReport nul = sample_residual(c0, opt, [&](const Point& p) {
    Eigen::MatrixXd ginv = h0.value(p).inverse();
    auto d = dl.values(p);
    Eigen::Vector2d v(d[0], d[1]);
    return std::make_pair(std::vector<double>{v.dot(ginv * v)}, v.squaredNorm());
  });
  require(nul.within(opt.tol), "grad lambda is not null on N0 (|dλ|² = " + fmt(nul.max_abs) + ")");

  // Warping factors must not vanish on the box.
  std::vector<Expr> factors;
  for (std::size_t i = 0; i < m; ++i) {
    Expr f = spec.lambda + num(spec.C - spec.rho[i]);
    Program prog = c0.compile({f});
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : c0.sample(200, 1)) {
      double v = prog.evaluate(p)[0];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (const auto& p : {c0.center()}) {
      double v = prog.evaluate(p)[0];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    // Corners of the box as well: the factors are affine in λ.
    const auto& box = c0.box();
    for (int mask = 0; mask < 4; ++mask) {
      Point q{(mask & 1) ? box[0].hi : box[0].lo, (mask & 2) ? box[1].hi : box[1].lo};
      double v = prog.evaluate(q)[0];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    require(lo * hi > 0 && std::min(std::fabs(lo), std::fabs(hi)) > 1e-9,
            "warping factor lambda + C - rho_" + std::to_string(i + 1) + " vanishes in the sample box");
    factors.push_back(f);
  }

  std::vector<MetricField> all{h0};
  std::vector<Expr> scale{Expr(1)};
  for (std::size_t i = 0; i < m; ++i) {
    all.push_back(spec.blocks[i]);
    scale.push_back(factors[i] * factors[i]);
  }
  WarpedResult res;
  res.metric = block_sum("warped", all, scale, factors);
  const MetricField& h = res.metric;
  const int n = h.dimension();
  int off = 0;
  for (const auto& f : all) {
    res.offsets.push_back(off);
    off += f.dimension();
  }

  // Solution: Jordan block on N0, ρ_i Id on N_i.
  std::vector<Expr> L(static_cast<std::size_t>(n * n), Expr(0));
  Expr lc = spec.lambda + num(spec.C);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Expr e = lc * h0(a, b) + spec.nilpotent * dl[{a}] * dl[{b}];
      L[at2(n, a, b)] = e;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const int o = res.offsets[i + 1];
    const MetricField& hi = spec.blocks[i];
    for (int a = 0; a < hi.dimension(); ++a) {
      for (int b = 0; b < hi.dimension(); ++b) {
        if (!hi(a, b).is_zero()) L[at2(n, o + a, o + b)] = num(spec.rho[i]) * factors[i] * factors[i] * hi(a, b);
      }
    }
  }
  SolutionTriple s;
  s.L = TensorField::symmetric(h.chart(), L);
  s.lambda = Expr(Rational(1, 2)) * trace(s.L, h);
  s.Lambda = gradient_form(s.lambda, h.chart());
  s.mu = Expr(0);
  s.B = 0;
  res.solution = s;
  res.extsys = verify_extsys(h, s, opt);

  // Connection and curvature identities against the factors.
  auto points = h.chart().sample(opt.trials, opt.seed);
  auto block_of = [&](int idx) {
    int b = 0;
    while (b + 1 < static_cast<int>(res.offsets.size()) && res.offsets[static_cast<std::size_t>(b + 1)] <= idx) ++b;
    return b;
  };
  std::vector<int> blk(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) blk[static_cast<std::size_t>(i)] = block_of(i);
  Program fprog = c0.compile(factors);
  std::vector<Expr> dfs;
  for (int a = 0; a < 2; ++a) dfs.push_back(c0.derivative(spec.lambda, a));
  Program dfprog = c0.compile(dfs);

  for (const auto& p : points) {
    PointCurvature pc = point_curvature(h, p);
    std::vector<PointCurvature> fc;
    for (std::size_t b = 0; b < all.size(); ++b) {
      fc.push_back(point_curvature(all[b], slice(p, res.offsets[b], all[b].dimension())));
    }
    Point p0 = slice(p, 0, 2);
    auto fv = fprog.evaluate(p0);
    auto dfv = dfprog.evaluate(p0);
    Eigen::Vector2d df(dfv[0], dfv[1]);
    Eigen::Vector2d grad = h0.value(p0).inverse() * df;  // grad f_i is the same for every i

    ResidualReport lc_r;
    ResidualReport cu_r;
    ResidualReport ri_r;
    lc_r.trials = cu_r.trials = ri_r.trials = 1;
    lc_r.witness = cu_r.witness = ri_r.witness = p;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const int bk = blk[static_cast<std::size_t>(k)];
          const int bi = blk[static_cast<std::size_t>(i)];
          const int bj = blk[static_cast<std::size_t>(j)];
          double expect = 0;
          if (bi == bj && bj == bk) {
            const int o = res.offsets[static_cast<std::size_t>(bi)];
            expect = fc[static_cast<std::size_t>(bi)].christoffel(k - o, i - o, j - o);
          } else if (bk == 0 && bi == bj && bi > 0) {
            const int o = res.offsets[static_cast<std::size_t>(bi)];
            const double f = fv[static_cast<std::size_t>(bi - 1)];
            expect = -f * all[static_cast<std::size_t>(bi)].value(slice(p, o, all[static_cast<std::size_t>(bi)].dimension()))(i - o, j - o) * grad(k);
          } else if (bk > 0 && ((bi == 0 && bj == bk) || (bj == 0 && bi == bk))) {
            const int x0 = bi == 0 ? i : j;
            const int xi = bi == 0 ? j : i;
            if (xi == k) expect = df(x0) / fv[static_cast<std::size_t>(bk - 1)];
          }
          const double got = pc.christoffel(k, i, j);
          lc_r.max_abs = std::max(lc_r.max_abs, std::fabs(got - expect));
          lc_r.scale = std::max(lc_r.scale, std::fabs(got));
        }
      }
    }
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            const int bi = blk[static_cast<std::size_t>(i)];
            const int bj = blk[static_cast<std::size_t>(j)];
            double expect = 0;
            if (bi == bj && blk[static_cast<std::size_t>(l)] == bi && blk[static_cast<std::size_t>(k)] == bi) {
              const int o = res.offsets[static_cast<std::size_t>(bi)];
              expect = fc[static_cast<std::size_t>(bi)].riem(l - o, i - o, j - o, k - o);
            }
            const double got = pc.riem(l, i, j, k);
            cu_r.max_abs = std::max(cu_r.max_abs, std::fabs(got - expect));
            cu_r.scale = std::max(cu_r.scale, std::fabs(got));
          }
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int bi = blk[static_cast<std::size_t>(i)];
        double expect = 0;
        if (bi == blk[static_cast<std::size_t>(j)]) {
          const int o = res.offsets[static_cast<std::size_t>(bi)];
          expect = fc[static_cast<std::size_t>(bi)].ricci(i - o, j - o);
        }
        ri_r.max_abs = std::max(ri_r.max_abs, std::fabs(pc.ricci(i, j) - expect));
        ri_r.scale = std::max(ri_r.scale, std::fabs(pc.ricci(i, j)));
      }
    }
    res.levi_civita.merge(lc_r);
    res.curvature.merge(cu_r);
    res.ricci.merge(ri_r);
  }
  return res;
}

ParallelFieldReport warped_parallel_field(const WarpedSpec& spec, const WarpedResult& w, const Expr& u,
                                           const CheckOptions& opt) {
  const MetricField& h = w.metric;
  const int n = h.dimension();
  const MetricField& hm = spec.blocks.back();
  const int om = w.offsets.back();
  const int dm = hm.dimension();

  for (const auto& p : hm.chart().sample(opt.trials, opt.seed)) {
    PointCurvature pc = point_curvature(hm, p);
    double worst = 0;
    for (double v : pc.riemann) worst = std::max(worst, std::fabs(v));
    require(worst < 1e-8, "the last block h_m is not flat (curvature " + fmt(worst) + ")");
  }
  for (const auto& name : coordinate_names(u)) {
    const auto& cs = hm.chart().coordinates();
    require(std::find(cs.begin(), cs.end(), name) != cs.end(),
            "u must be a function on the last block, but depends on '" + name + "'");
  }
  TensorField du_m = gradient_form(u, hm.chart());
  ResidualReport unit = sample_residual(hm.chart(), opt, [&](const Point& p) {
    Eigen::MatrixXd ginv = hm.value(p).inverse();
    auto d = du_m.values(p);
    Eigen::Map<const Eigen::VectorXd> v(d.data(), dm);
    return std::make_pair(std::vector<double>{v.dot(ginv * v) - 1.0}, 1.0);
  });
  require(unit.within(opt.tol), "du must have unit length on the last block (defect " + fmt(unit.max_abs) + ")");
  ResidualReport dpar = parallel_residual(du_m, hm, opt);
  require(dpar.within(opt.tol), "du is not parallel on the last block");

  require(h.has_symbolic_inverse(), "the warped metric needs a symbolic inverse");
  std::vector<Expr> du(static_cast<std::size_t>(n), Expr(0));
  for (int a = 0; a < dm; ++a) du[static_cast<std::size_t>(om + a)] = du_m[{a}];
  std::vector<Expr> dl(static_cast<std::size_t>(n), Expr(0));
  for (int a = 0; a < 2; ++a) dl[static_cast<std::size_t>(a)] = spec.h0.chart().derivative(spec.lambda, a);
  std::vector<Expr> U(static_cast<std::size_t>(n));
  std::vector<Expr> Ls(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> tu;
    std::vector<Expr> tl;
    for (int j = 0; j < n; ++j) {
      const Expr& hij = h.inverse(i, j);
      if (hij.is_zero()) continue;
      if (!du[static_cast<std::size_t>(j)].is_zero()) tu.push_back(hij * du[static_cast<std::size_t>(j)]);
      if (!dl[static_cast<std::size_t>(j)].is_zero()) tl.push_back(hij * dl[static_cast<std::size_t>(j)]);
    }
    U[static_cast<std::size_t>(i)] = sum(tu);
    Ls[static_cast<std::size_t>(i)] = sum(tl);
  }
  Expr fm = spec.lambda + num(spec.C - spec.rho.back());
  std::vector<Expr> W(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) W[static_cast<std::size_t>(i)] = fm * U[static_cast<std::size_t>(i)] + u * Ls[static_cast<std::size_t>(i)];

  ParallelFieldReport rep;
  rep.W = TensorField::vector(h.chart(), W);
  rep.parallel = parallel_residual(rep.W, h, opt);
  TensorField Uf = TensorField::vector(h.chart(), U);
  Program lprog = h.chart().compile(Ls);
  Program fprog = h.chart().compile({fm});
  Program duprog = h.chart().compile(du);
  Program wprog = h.chart().compile(W);
  rep.independent = true;
  const std::size_t first_block = static_cast<std::size_t>(w.offsets[1]);
  for (const auto& p : h.chart().sample(opt.trials, opt.seed)) {
    auto nu = covariant_derivative_values(Uf, h, p);  // nu[a*n + b] = ∇_b U^a
    auto lv = lprog.evaluate(p);
    auto dv = duprog.evaluate(p);
    const double f = fprog.evaluate(p)[0];
    ResidualReport r1;
    ResidualReport r3;
    r1.trials = r3.trials = 1;
    r1.witness = r3.witness = p;
    for (int a = 0; a < n; ++a) {
      double along = 0;
      for (int b = 0; b < n; ++b) {
        const double v = nu[at2(n, a, b)];
        r1.scale = std::max(r1.scale, std::fabs(v));
        along += v * lv[static_cast<std::size_t>(b)];
        if (static_cast<std::size_t>(b) >= first_block && b < om) r1.max_abs = std::max(r1.max_abs, std::fabs(v));
        if (b >= om) {
          const double expect = -dv[static_cast<std::size_t>(b)] * lv[static_cast<std::size_t>(a)] / f;
          r3.max_abs = std::max(r3.max_abs, std::fabs(v - expect));
          r3.scale = std::max({r3.scale, std::fabs(v), std::fabs(expect)});
        }
      }
      r1.max_abs = std::max(r1.max_abs, std::fabs(along));
    }
    rep.direc1.merge(r1);
    rep.direc3.merge(r3);
    auto wv = wprog.evaluate(p);
    Eigen::Map<const Eigen::VectorXd> a(wv.data(), n);
    Eigen::Map<const Eigen::VectorXd> b(lv.data(), n);
    double wedge = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) wedge = std::max(wedge, std::fabs(a(i) * b(j) - a(j) * b(i)));
    }
    if (!(wedge > 1e-6 * a.norm() * b.norm())) rep.independent = false;
  }
  return rep;
}

NullConeFamily null_cone_family(const MetricField& h, const Expr& F, double C, const CheckOptions& opt) {
  const Chart& hc = h.chart();
  const int nh = h.dimension();
  for (const auto& c : hc.coordinates()) {
    require(c != "r" && c != "t", "the base chart must not use the coordinate names r or t");
  }
  require(h.has_symbolic_inverse(), "h needs a symbolic inverse");
  // Hessian condition ∇^h∇^h F = C h.
  TensorField dF = gradient_form(F, hc);
  NullConeFamily out;
  out.hessian = sample_residual(hc, opt, [&](const Point& p) {
    auto hess = covariant_derivative_values(dF, h, p);
    Eigen::MatrixXd hv = h.value(p);
    std::vector<double> r(hess.size());
    double scale = std::fabs(C) * hv.cwiseAbs().maxCoeff();
    for (int i = 0; i < nh; ++i) {
      for (int j = 0; j < nh; ++j) {
        r[at2(nh, i, j)] = hess[at2(nh, i, j)] - C * hv(i, j);
        scale = std::max(scale, std::fabs(hess[at2(nh, i, j)]));
      }
    }
    return std::make_pair(r, scale);
  });
  require(out.hessian.within(opt.tol), "Hessian condition fails: |∇∇F - C h| = " + fmt(out.hessian.max_abs));

  // Base g = -dt² + e^{2t} h.
  std::vector<std::string> coords{"t"};
  coords.insert(coords.end(), hc.coordinates().begin(), hc.coordinates().end());
  std::vector<Interval> box{{-0.5, 0.5}};
  box.insert(box.end(), hc.box().begin(), hc.box().end());
  Chart bc("null_base(" + hc.name() + ")", coords, box, hc.excluded(), hc.constants());
  const int n = nh + 1;
  Expr t = Expr::coordinate("t");
  Expr e2t = exp(Expr(2) * t);
  std::vector<Expr> g(static_cast<std::size_t>(n * n), Expr(0));
  g[0] = Expr(-1);
  for (int i = 0; i < nh; ++i) {
    for (int j = 0; j < nh; ++j) {
      if (!h(i, j).is_zero()) g[at2(n, i + 1, j + 1)] = e2t * h(i, j);
    }
  }
  out.cone = cone(MetricField(bc, g), 1);
  const MetricField& gh = out.cone.metric;
  const Chart& cc = gh.chart();
  Expr r = Expr::coordinate("r");
  Expr et = exp(t);
  Expr emt = exp(-t);
  std::vector<Expr> v(static_cast<std::size_t>(n + 1), Expr(0));
  v[0] = et;
  v[1] = -et / r;
  out.v = TensorField::vector(cc, v);
  std::vector<Expr> V(static_cast<std::size_t>(n + 1), Expr(0));
  Expr half_c = num(C / 2);
  V[0] = F * et - half_c * emt;
  V[1] = -(F * et + half_c * emt) / r;
  for (int i = 0; i < nh; ++i) {
    std::vector<Expr> terms;
    for (int j = 0; j < nh; ++j) {
      if (!h.inverse(i, j).is_zero()) terms.push_back(h.inverse(i, j) * dF[{j}]);
    }
    V[static_cast<std::size_t>(i + 2)] = emt * sum(terms) / r;
  }
  out.V = TensorField::vector(cc, V);
  out.v_parallel = parallel_residual(out.v, gh, opt);
  out.V_parallel = parallel_residual(out.V, gh, opt);
  Point c = cc.center();
  Eigen::MatrixXd gv = gh.value(c);
  auto vv = out.v.values(c);
  auto VV = out.V.values(c);
  Eigen::Map<const Eigen::VectorXd> a(vv.data(), n + 1);
  Eigen::Map<const Eigen::VectorXd> b(VV.data(), n + 1);
  out.g_v_V = a.dot(gv * b);
  out.g_V_V = b.dot(gv * b);
  return out;
}

TensorField cone_lift(const Construction& cone, const SolutionTriple& s, int middle_sign) {
  const MetricField& g = cone.metric;
  const int N = g.dimension();
  const int n = N - 1;
  require(s.L.dimension() == n, "solution does not live on the cone base");
  Expr r = g.chart().coordinate(0);
  std::vector<Expr> c(static_cast<std::size_t>(N * N), Expr(0));
  c[0] = s.mu;
  for (int a = 0; a < n; ++a) {
    const Expr& la = s.Lambda[{a}];
    if (!la.is_zero()) {
      Expr e = Expr(middle_sign) * r * la;
      c[at2(N, 0, a + 1)] = e;
      c[at2(N, a + 1, 0)] = e;
    }
    for (int b = 0; b < n; ++b) {
      const Expr& l = s.L[{a, b}];
      if (!l.is_zero()) c[at2(N, a + 1, b + 1)] = r * r * l;
    }
  }
  return TensorField::symmetric(g.chart(), c);
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

std::vector<Expr> lower_to_full(const Chart& chart, const std::vector<std::string>& lower) {
  const int n = chart.dimension();
  std::vector<Expr> c(static_cast<std::size_t>(n * n), Expr(0));
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      Expr e = chart.parse(lower.at(k++));
      c[at2(n, i, j)] = e;
      c[at2(n, j, i)] = e;
    }
  }
  return c;
}

MetricField metric_from(const Chart& chart, const std::vector<std::string>& lower) {
  return MetricField(chart, lower_to_full(chart, lower));
}

TensorField sym_from(const Chart& chart, const std::vector<std::string>& lower) {
  return TensorField::symmetric(chart, lower_to_full(chart, lower));
}

MetricField sphere(int n, const std::string& name, const std::vector<std::string>& coords, double radius2) {
  std::vector<Interval> box(static_cast<std::size_t>(n), Interval{0.5, 2.5});
  box.back() = {-1.0, 1.0};
  std::vector<Expr> excluded;
  Chart chart(name, coords, box);
  std::vector<Expr> diag;
  Expr acc = num(radius2);
  for (int i = 0; i < n; ++i) {
    diag.push_back(acc);
    if (i + 1 < n) {
      Expr s = sin(chart.coordinate(i));
      acc = acc * s * s;
      excluded.push_back(s);
    }
  }
  return MetricField::diagonal(Chart(name, coords, box, excluded), diag);
}

MetricField example14_metric() {
  Chart c("example14", {"t", "x0", "x1", "x2", "x3"}, {{-0.5, 0.5}, {-1, 1}, {-1, 1}, {-1, 1}, {0.5, 2.5}},
          {Expr::coordinate("x3")});
  return metric_from(c, {"-1",                                //
                         "0", "0",                            //
                         "0", "exp(2*t)", "exp(2*t)*exp(x2)*sin(x3)",  //
                         "0", "0", "0", "-exp(2*t)",          //
                         "0", "0", "0", "0", "-exp(2*t)"});
}

MetricField s2xs3_metric() {
  Chart c("s2xs3", {"th1", "ph1", "th2", "ps2", "ph2"}, {{0.5, 2.5}, {-1, 1}, {0.5, 2.5}, {0.5, 2.5}, {-1, 1}});
  return MetricField::diagonal(c, {c.parse("1/4"), c.parse("sin(th1)^2/4"), c.parse("1/2"), c.parse("sin(th2)^2/2"),
                                   c.parse("sin(th2)^2*sin(ps2)^2/2")});
}

MetricField s2xs2_metric() {
  Chart c("s2xs2", {"th1", "ph1", "th2", "ph2"}, {{0.5, 2.5}, {-1, 1}, {0.5, 2.5}, {-1, 1}});
  return MetricField::diagonal(c, {c.parse("1/3"), c.parse("sin(th1)^2/3"), c.parse("1/3"), c.parse("sin(th2)^2/3")});
}

CatalogEntry base_entry(std::string name, std::string description, MetricField g) {
  CatalogEntry e;
  e.name = std::move(name);
  e.description = std::move(description);
  e.metric = std::move(g);
  return e;
}

void add_solution(CatalogEntry& e, const std::string& name, const TensorField& L, double B) {
  e.solutions.push_back({name, make_triple(e.metric, L, B)});
}

void verify_entry(const CatalogEntry& e) {
  CheckOptions opt;
  auto fail = [&](const std::string& what) { throw ConstructionError("catalog entry '" + e.name + "': " + what); };
  if (e.scal) {
    EinsteinReport er = is_einstein(e.metric, opt);
    if (!er.einstein) fail("not Einstein (residual " + fmt(er.max_residual) + ")");
    if (std::fabs(er.scal - *e.scal) > 1e-6 * (1 + std::fabs(*e.scal))) fail("Scal = " + fmt(er.scal));
  }
  if (e.signature) {
    SignatureCounts s = signature(e.metric, 10, 0);
    if (!(s == *e.signature)) fail("unexpected signature counts");
  }
  for (const auto& s : e.solutions) {
    ExtSysReport r = verify_extsys(e.metric, s.triple, opt);
    if (!r.pass) {
      fail("solution " + s.name + " fails the extended system (residuals " + fmt(r.first.max_abs) + ", " +
           fmt(r.second.max_abs) + ", " + fmt(r.third.max_abs) + ")");
    }
  }
  for (const auto& f : e.parallel_fields) {
    ResidualReport r = parallel_residual(f.field, e.metric, opt);
    if (!r.within(opt.tol)) fail("field " + f.name + " is not parallel (residual " + fmt(r.max_abs) + ")");
  }
  if (e.xi) {
    ResidualReport r = cone_field_residual(*e.xi, e.metric, opt);
    if (!r.within(opt.tol)) fail("cone field check failed (" + fmt(r.max_abs) + ")");
  }
}

CatalogEntry cone_entry(const std::string& name, const std::string& description, const std::string& base,
                        const Construction& c) {
  CatalogEntry e = base_entry(name, description, c.metric);
  e.xi = c.xi;
  e.base = base;
  return e;
}

using Builder = std::function<CatalogEntry()>;

const std::vector<std::pair<std::string, Builder>>& builders() {
  static const std::vector<std::pair<std::string, Builder>> list = [] {
    std::vector<std::pair<std::string, Builder>> b;
    for (int n = 2; n <= 6; ++n) {
      b.emplace_back("flat" + std::to_string(n), [n] {
        Construction f = flat_space(n);
        CatalogEntry e = base_entry("flat" + std::to_string(n), "Euclidean R^" + std::to_string(n), f.metric);
        e.xi = f.xi;
        e.scal = 0;
        e.signature = SignatureCounts{n, 0};
        e.mobility = (n + 1) * (n + 2) / 2;
        e.par02 = n * (n + 1) / 2;
        e.k = n;
        e.l = 0;
        add_solution(e, "g", e.metric.as_tensor(), 0);
        // Remaining basis of A + x⊙c + μ x⊗x: constant parts E_ab without E_11,
        // linear parts c = e_a, and x⊗x.
        const Chart& ch = e.metric.chart();
        auto idx = [n](int i, int j) { return static_cast<std::size_t>(i * n + j); };
        for (int a = 0; a < n; ++a) {
          for (int b = a; b < n; ++b) {
            if (a == 0 && b == 0) continue;
            std::vector<Expr> L(static_cast<std::size_t>(n * n), Expr(0));
            L[idx(a, b)] = Expr(1);
            L[idx(b, a)] = Expr(1);
            add_solution(e, "E" + std::to_string(a + 1) + std::to_string(b + 1), TensorField::symmetric(ch, L), 0);
          }
        }
        for (int a = 0; a < n; ++a) {
          std::vector<Expr> L(static_cast<std::size_t>(n * n), Expr(0));
          for (int i = 0; i < n; ++i) {
            L[idx(i, a)] = L[idx(i, a)] + ch.coordinate(i);
            L[idx(a, i)] = L[idx(a, i)] + ch.coordinate(i);
          }
          L[idx(a, a)] = Expr(2) * ch.coordinate(a);
          add_solution(e, "c" + std::to_string(a + 1), TensorField::symmetric(ch, L), 0);
        }
        std::vector<Expr> xx(static_cast<std::size_t>(n * n));
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) xx[idx(i, j)] = ch.coordinate(i) * ch.coordinate(j);
        }
        add_solution(e, "xx", TensorField::symmetric(ch, xx), 0);
        return e;
      });
    }
    const std::vector<std::vector<std::string>> sphere_coords{
        {"th", "ph"}, {"chi", "th", "ph"}, {"psi", "chi", "th", "ph"}};
    for (int n = 2; n <= 4; ++n) {
      b.emplace_back("s" + std::to_string(n), [n, sphere_coords] {
        const auto& coords = sphere_coords[static_cast<std::size_t>(n - 2)];
        CatalogEntry e = base_entry("s" + std::to_string(n), "unit round S^" + std::to_string(n) + " in a spherical chart",
                                    sphere(n, "s" + std::to_string(n), coords, 1.0));
        e.scal = n * (n - 1);
        e.signature = SignatureCounts{n, 0};
        e.mobility = (n + 1) * (n + 2) / 2;
        e.par02 = 1;
        e.k = 0;
        e.l = 1;
        add_solution(e, "g", e.metric.as_tensor(), -1);
        // Pullbacks dX_i⊙dX_j of the embedding coordinates; together with g
        // (= Σ dX_i²) they span all solutions once dX_1² is dropped.
        const Chart& ch = e.metric.chart();
        std::vector<Expr> X(static_cast<std::size_t>(n + 1));
        Expr prefix = Expr(1);
        for (int i = 0; i < n; ++i) {
          X[static_cast<std::size_t>(i)] = prefix * cos(ch.coordinate(i));
          prefix = prefix * sin(ch.coordinate(i));
        }
        X[static_cast<std::size_t>(n)] = prefix;
        for (int i = 0; i <= n; ++i) {
          for (int j = i; j <= n; ++j) {
            if (i == 0 && j == 0) continue;
            std::vector<Expr> L(static_cast<std::size_t>(n * n));
            for (int a = 0; a < n; ++a) {
              for (int b = 0; b < n; ++b) {
                Expr u = ch.derivative(X[static_cast<std::size_t>(i)], a) * ch.derivative(X[static_cast<std::size_t>(j)], b);
                Expr v = ch.derivative(X[static_cast<std::size_t>(j)], a) * ch.derivative(X[static_cast<std::size_t>(i)], b);
                L[static_cast<std::size_t>(a * n + b)] = i == j ? u : u + v;
              }
            }
            add_solution(e, "X" + std::to_string(i + 1) + "X" + std::to_string(j + 1), TensorField::symmetric(ch, L), -1);
          }
        }
        return e;
      });
    }
    b.emplace_back("example14", [] {
      CatalogEntry e = base_entry("example14", "5-dimensional Lorentzian Einstein metric with D = 4", example14_metric());
      const Chart& c = e.metric.chart();
      e.scal = 20;
      e.signature = SignatureCounts{1, 4};
      e.mobility = 4;
      add_solution(e, "g", e.metric.as_tensor(), -1);
      add_solution(e, "L1", sym_from(c, {"exp(2*t)", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0"}), -1);
      add_solution(e, "L2", sym_from(c, {"exp(2*t)*x1^2", "0", "0", "exp(2*t)*x1", "0", "exp(2*t)", "0", "0", "0", "0",
                                         "0", "0", "0", "0", "0"}),
                   -1);
      add_solution(e, "L3", sym_from(c, {"2*exp(2*t)*x1", "0", "0", "exp(2*t)", "0", "0", "0", "0", "0", "0", "0", "0",
                                         "0", "0", "0"}),
                   -1);
      return e;
    });
    auto cone36 = [](const std::string& name, const std::string& description) {
      Construction c = cone(example14_metric(), 1);
      CatalogEntry e = cone_entry(name, description, "example14", c);
      const Chart& ch = e.metric.chart();
      e.scal = 0;
      e.signature = SignatureCounts{2, 4};
      e.par02 = 4;
      e.k = 2;
      e.l = 1;
      e.realizes_n = 5;
      e.lorentz_list = true;
      auto P = [&](const char* s) { return ch.parse(s); };
      e.parallel_fields.push_back(
          {"v1", TensorField::vector(ch, {P("exp(t)"), P("-exp(t)/r"), Expr(0), Expr(0), Expr(0), Expr(0)})});
      e.parallel_fields.push_back({"v2", TensorField::vector(ch, {P("x1*exp(t)"), P("-x1*exp(t)/r"), P("exp(-t)/r"),
                                                                  Expr(0), Expr(0), Expr(0)})});
      return e;
    };
    b.emplace_back("cone36", [cone36] {
      return cone36("cone36", "Ricci-flat nonflat cone over example14 with two parallel null fields");
    });
    b.emplace_back("case2_n5", [cone36] {
      return cone36("case2_n5", "signature (n-1,2) realization for n = 5 (k = 2, l = 1) on the sector r > 0");
    });
    b.emplace_back("s2xs3", [] {
      CatalogEntry e = base_entry("s2xs3", "Einstein product S^2(1/2) x S^3(1/sqrt 2)", s2xs3_metric());
      e.scal = 20;
      e.signature = SignatureCounts{5, 0};
      e.mobility = 1;
      add_solution(e, "g", e.metric.as_tensor(), -1);
      return e;
    });
    b.emplace_back("cone_s2xs3", [] {
      CatalogEntry e = cone_entry("cone_s2xs3", "Ricci-flat cone over S^2(1/2) x S^3(1/sqrt 2)", "s2xs3",
                                  cone(s2xs3_metric(), 1));
      e.scal = 0;
      e.signature = SignatureCounts{6, 0};
      e.par02 = 1;
      e.k = 0;
      e.l = 1;
      return e;
    });
    b.emplace_back("s2xs2", [] {
      CatalogEntry e = base_entry("s2xs2", "Einstein product S^2(1/sqrt 3) x S^2(1/sqrt 3)", s2xs2_metric());
      e.scal = 12;
      e.signature = SignatureCounts{4, 0};
      e.mobility = 1;
      add_solution(e, "g", e.metric.as_tensor(), -1);
      return e;
    });
    b.emplace_back("cone5", [] {
      CatalogEntry e = cone_entry("cone5", "5-dimensional Ricci-flat cone over S^2(1/sqrt 3) x S^2(1/sqrt 3)", "s2xs2",
                                  cone(s2xs2_metric(), 1));
      e.scal = 0;
      e.signature = SignatureCounts{5, 0};
      e.par02 = 1;
      e.k = 0;
      e.l = 1;
      return e;
    });
    b.emplace_back("case1_n5_k1_l1", [] {
      Construction c = product(flat_space(1, "y", {0.5, 1.5}), cone(s2xs2_metric(), 1));
      CatalogEntry e = base_entry("case1_n5_k1_l1", "R^1 x cone5: realization of k(k+1)/2 + l = 2 for n = 5", c.metric);
      e.xi = c.xi;
      e.scal = 0;
      e.signature = SignatureCounts{6, 0};
      e.par02 = 2;
      e.k = 1;
      e.l = 1;
      e.realizes_n = 5;
      e.lorentz_list = false;
      return e;
    });
    b.emplace_back("case1_n9_k0_l2", [] {
      Construction a = cone(s2xs2_metric(), 1);
      Construction bb{rename_coordinates(a.metric, "_b"), std::nullopt, std::nullopt};
      std::vector<Expr> xi = a.xi->components();
      bb.xi = TensorField::vector(bb.metric.chart(), {Expr::coordinate("r_b"), Expr(0), Expr(0), Expr(0), Expr(0)});
      Construction c = product(a, bb);
      CatalogEntry e = base_entry("case1_n9_k0_l2", "cone5 x cone5: realization of l = 2 for n = 9", c.metric);
      e.xi = c.xi;
      e.scal = 0;
      e.signature = SignatureCounts{10, 0};
      e.par02 = 2;
      e.k = 0;
      e.l = 2;
      e.realizes_n = 9;
      e.lorentz_list = false;
      return e;
    });
    b.emplace_back("r2_x_cone_s2xs3", [] {
      Construction c = product(flat_space(2, "y"), cone(s2xs3_metric(), 1));
      CatalogEntry e = base_entry("r2_x_cone_s2xs3", "flat R^2 times the Ricci-flat cone over S^2 x S^3", c.metric);
      e.xi = c.xi;
      e.scal = 0;
      e.signature = SignatureCounts{8, 0};
      e.par02 = 4;
      e.k = 2;
      e.l = 1;
      return e;
    });
    b.emplace_back("cone_s2", [] {
      CatalogEntry e = cone_entry("cone_s2", "cone over the unit S^2 (flat R^3 sector)", "s2",
                                  cone(sphere(2, "s2", {"th", "ph"}, 1.0), 1));
      e.scal = 0;
      e.signature = SignatureCounts{3, 0};
      e.par02 = 6;
      e.k = 3;
      e.l = 0;
      return e;
    });
    b.emplace_back("cone_s3", [] {
      CatalogEntry e = cone_entry("cone_s3", "cone over the unit S^3 (flat R^4 sector)", "s3",
                                  cone(sphere(3, "s3", {"chi", "th", "ph"}, 1.0), 1));
      e.scal = 0;
      e.signature = SignatureCounts{4, 0};
      e.par02 = 10;
      e.k = 4;
      e.l = 0;
      return e;
    });
    b.emplace_back("warped", [] {
      WarpedSpec spec = catalog_warped_spec();
      WarpedResult w = warped(spec);
      CatalogEntry e = base_entry("warped", "doubly warped Ricci-flat metric with a Jordan-block solution (B = 0)", w.metric);
      e.scal = 0;
      e.signature = SignatureCounts{5, 1};
      e.solutions.push_back({"L", w.solution});
      ParallelFieldReport W = warped_parallel_field(spec, w, Expr::coordinate("w1"));
      e.parallel_fields.push_back({"W", W.W});
      const Chart& ch = e.metric.chart();
      e.parallel_fields.push_back(
          {"Lambda", TensorField::vector(ch, {Expr(0), Expr(1), Expr(0), Expr(0), Expr(0), Expr(0)})});
      return e;
    });
    b.emplace_back("null_cone_flat3", [] {
      Chart hc("flat_y3", {"y1", "y2", "y3"}, std::vector<Interval>(3, Interval{-1.0, 1.0}));
      MetricField h = MetricField::diagonal(hc, {Expr(1), Expr(1), Expr(1)});
      NullConeFamily f = null_cone_family(h, hc.parse("(y1^2 + y2^2 + y3^2)/2"), 1.0);
      CatalogEntry e = base_entry("null_cone_flat3", "cone dr^2 + r^2(-dt^2 + e^{2t}h) over flat h with F = |y|^2/2, C = 1",
                                  f.cone.metric);
      e.xi = f.cone.xi;
      e.scal = 0;
      e.signature = SignatureCounts{4, 1};
      e.par02 = 15;
      e.k = 5;
      e.l = 0;
      e.parallel_fields.push_back({"v", f.v});
      e.parallel_fields.push_back({"V", f.V});
      return e;
    });
    return b;
  }();
  return list;
}

}  // namespace

WarpedSpec catalog_warped_spec() {
  Chart c0("N0", {"x", "y"}, {{2.5, 3.5}, {0.5, 1.5}});
  MetricField h0(c0, {Expr(0), Expr(1), Expr(1), Expr(0)});
  Chart c1("N1", {"u1", "u2"}, {{-1, 1}, {-1, 1}});
  Chart c2("N2", {"w1", "w2"}, {{-1, 1}, {-1, 1}});
  WarpedSpec spec;
  spec.h0 = h0;
  spec.lambda = c0.parse("x");
  spec.nilpotent = c0.parse("2*y");
  spec.blocks = {MetricField::diagonal(c1, {Expr(1), Expr(1)}), MetricField::diagonal(c2, {Expr(1), Expr(1)})};
  spec.C = 0;
  spec.rho = {1, 2};
  return spec;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : builders()) out.push_back(name);
  return out;
}

CatalogEntry catalog_entry(const std::string& name) {
  for (const auto& [n, build] : builders()) {
    if (n == name) {
      CatalogEntry e = build();
      verify_entry(e);
      return e;
    }
  }
  std::string known;
  for (const auto& n : catalog_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown catalog entry '" + name + "' (known: " + known + ")");
}

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  for (const auto& name : catalog_names()) out.push_back(catalog_entry(name));
  return out;
}

}  // namespace einmob
