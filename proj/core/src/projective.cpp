#include "einmob/projective.hpp"

#include <cmath>
#include <random>

#include "einmob/curvature.hpp"

namespace einmob {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Values of a symmetric (0,2) field and its first partials at a point.
struct LocalTensor {
  Eigen::MatrixXd value;
  std::vector<Eigen::MatrixXd> d;  // d[k](i,j) = ∂_k T_ij
};

LocalTensor local_two_tensor(const Program& prog, int n, const Point& p) {
  auto jets = prog.evaluate_jet(p, 1);
  LocalTensor t;
  t.value.resize(n, n);
  t.d.assign(static_cast<std::size_t>(n), Eigen::MatrixXd(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Jet& jt = jets[static_cast<std::size_t>(i * n + j)];
      t.value(i, j) = jt.value();
      for (int k = 0; k < n; ++k) t.d[static_cast<std::size_t>(k)](i, j) = jt.coefficients()[static_cast<std::size_t>(1 + k)];
    }
  }
  return t;
}

// (∇_k T)_ij for a (0,2) tensor from local data; gam[k](m, i) = Γ^m_{ki}.
std::vector<Eigen::MatrixXd> nabla_two_tensor(const LocalTensor& t, const std::vector<Eigen::MatrixXd>& gam) {
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t k = 0; k < gam.size(); ++k) {
    out.push_back(t.d[k] - gam[k].transpose() * t.value - t.value * gam[k]);
  }
  return out;
}

std::vector<Eigen::MatrixXd> gamma_values(const MetricJet& mj) {
  std::vector<Eigen::MatrixXd> gam;
  for (const auto& m : mj.gamma) gam.push_back(m.value());
  return gam;
}

// λ and Λ = dλ at p from jets of g^{-1} and L.
std::pair<double, Eigen::VectorXd> local_lambda(const MetricJet& mj, const Program& lprog, int n, const Point& p) {
  auto jets = lprog.evaluate_jet(p, 1);
  Jet lam(mj.space.get(), 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!mj.ginv.nonzero(i, j)) continue;
      lam.add_product(mj.ginv.at(i, j), jets[static_cast<std::size_t>(i * n + j)], 0.5);
    }
  }
  Eigen::VectorXd Lambda(n);
  for (int k = 0; k < n; ++k) Lambda(k) = lam.coefficients()[static_cast<std::size_t>(1 + k)];
  return {lam.value(), Lambda};
}

// ∇_k L_ij − g_ki Λ_j − g_kj Λ_i, flattened; returns the scale in `scale`.
std::vector<double> main_residual(const Eigen::MatrixXd& g, const std::vector<Eigen::MatrixXd>& nablaL,
                                  const Eigen::VectorXd& Lambda, double& scale) {
  const auto n = static_cast<int>(g.rows());
  std::vector<double> out;
  scale = 0;
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd rhs = g.col(k) * Lambda.transpose() + Lambda * g.row(k);
    scale = std::max({scale, max_abs(nablaL[static_cast<std::size_t>(k)]), max_abs(rhs)});
    Eigen::MatrixXd r = nablaL[static_cast<std::size_t>(k)] - rhs;
    out.insert(out.end(), r.data(), r.data() + r.size());
  }
  return out;
}

void require_two_tensor(const TensorField& L, const MetricField& g) {
  if (L.up() != 0 || L.down() != 2) throw std::invalid_argument("expected a (0,2) tensor");
  if (L.chart().coordinates() != g.chart().coordinates()) throw std::invalid_argument("chart mismatch");
}

}  // namespace

TensorField l_of_pair(const MetricField& g, const MetricField& gbar) {
  if (g.chart().coordinates() != gbar.chart().coordinates()) throw std::invalid_argument("chart mismatch");
  const int n = g.dimension();
  Expr ratio = gbar.determinant() / g.determinant();
  Expr factor = pow(abs(ratio), Rational(1, n + 1));
  std::vector<Expr> c(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<Expr> terms;
      for (int a = 0; a < n; ++a) {
        if (g(i, a).is_zero()) continue;
        for (int b = 0; b < n; ++b) {
          if (gbar.inverse(a, b).is_zero() || g(b, j).is_zero()) continue;
          terms.push_back(g(i, a) * gbar.inverse(a, b) * g(b, j));
        }
      }
      Expr e = factor * sum(terms);
      c[static_cast<std::size_t>(i * n + j)] = e;
      c[static_cast<std::size_t>(j * n + i)] = e;
    }
  }
  return TensorField::symmetric(g.chart(), std::move(c));
}

MainReport verify_main(const MetricField& g, const TensorField& L, const CheckOptions& opt) {
  require_two_tensor(L, g);
  const int n = g.dimension();
  MainReport rep;
  Program lprog = g.chart().compile(L.components());
  double lambda_scale = 0;
  rep.residual = sample_residual(g.chart(), opt, [&](const Point& p) {
    MetricJet mj = g.jet(p, 1);
    auto gam = gamma_values(mj);
    LocalTensor lt = local_two_tensor(lprog, n, p);
    auto [lam, Lambda] = local_lambda(mj, lprog, n, p);
    rep.max_Lambda = std::max(rep.max_Lambda, Lambda.cwiseAbs().maxCoeff());
    lambda_scale = std::max({lambda_scale, max_abs(lt.value) * max_abs(mj.g.value()), std::fabs(lam)});
    double scale = 0;
    auto r = main_residual(mj.g.value(), nabla_two_tensor(lt, gam), Lambda, scale);
    return std::make_pair(r, scale);
  });
  rep.pass = rep.residual.within(opt.tol);
  rep.affine = rep.max_Lambda <= opt.tol * (1 + lambda_scale + rep.residual.scale);
  if (g.has_symbolic_inverse()) {
    Expr lam = Expr(Rational(1, 2)) * trace(L, g);
    rep.lambda = lam;
    rep.Lambda = gradient_form(lam, g.chart());
  }
  return rep;
}

SolutionTriple make_triple(const MetricField& g, const TensorField& L, double B) {
  require_two_tensor(L, g);
  const int n = g.dimension();
  SolutionTriple s;
  s.L = L;
  s.B = B;
  s.lambda = Expr(Rational(1, 2)) * trace(L, g);
  s.Lambda = gradient_form(s.lambda, g.chart());
  Point p0 = g.chart().center();
  MetricJet mj = g.jet(p0, 1);
  auto gam = gamma_values(mj);
  auto jets = g.chart().compile(s.Lambda.components()).evaluate_jet(p0, 1);
  Eigen::VectorXd Lam(n);
  Eigen::MatrixXd dLam(n, n);  // dLam(k, j) = ∂_k Λ_j
  for (int j = 0; j < n; ++j) {
    Lam(j) = jets[static_cast<std::size_t>(j)].value();
    for (int k = 0; k < n; ++k) dLam(k, j) = jets[static_cast<std::size_t>(j)].coefficients()[static_cast<std::size_t>(1 + k)];
  }
  Eigen::MatrixXd nabla(n, n);
  for (int k = 0; k < n; ++k) nabla.row(k) = dLam.row(k) - (gam[static_cast<std::size_t>(k)].transpose() * Lam).transpose();
  Eigen::MatrixXd Lv = L.chart().compile(L.components()).evaluate(p0).size() ? Eigen::MatrixXd(n, n) : Eigen::MatrixXd();
  auto lvals = L.values(p0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) Lv(i, j) = lvals[static_cast<std::size_t>(i * n + j)];
  }
  double mu0 = (mj.ginv.value().cwiseProduct(nabla - B * Lv)).sum() / n;
  double lam0 = g.chart().evaluate(s.lambda, p0);
  Rational b = rationalize(B);
  Rational c = rationalize(mu0 - 2 * B * lam0);
  s.mu = Expr(Rational(2) * b) * s.lambda + Expr(c);
  return s;
}

ExtSysReport verify_extsys(const MetricField& g, const SolutionTriple& s, const CheckOptions& opt) {
  require_two_tensor(s.L, g);
  const int n = g.dimension();
  EinsteinReport er = is_einstein(g, opt);
  if (!er.einstein) throw BMismatchError("metric is not Einstein: " + er.witness_component);
  if (std::fabs(er.B - s.B) > 1e-6 * (1 + std::fabs(er.B))) {
    throw BMismatchError("B = " + std::to_string(s.B) + " does not match -Scal/(n(n-1)) = " + std::to_string(er.B));
  }
  ExtSysReport rep;
  rep.B = s.B;
  Program lprog = g.chart().compile(s.L.components());
  std::vector<Expr> rest = s.Lambda.components();
  rest.push_back(s.mu);
  Program rprog = g.chart().compile(rest);
  for (const auto& p : g.chart().sample(opt.trials, opt.seed)) {
    MetricJet mj = g.jet(p, 1);
    auto gam = gamma_values(mj);
    Eigen::MatrixXd gv = mj.g.value();
    LocalTensor lt = local_two_tensor(lprog, n, p);
    auto jets = rprog.evaluate_jet(p, 1);
    Eigen::VectorXd Lam(n);
    Eigen::MatrixXd dLam(n, n);
    for (int j = 0; j < n; ++j) {
      Lam(j) = jets[static_cast<std::size_t>(j)].value();
      for (int k = 0; k < n; ++k) dLam(k, j) = jets[static_cast<std::size_t>(j)].coefficients()[static_cast<std::size_t>(1 + k)];
    }
    const Jet& mu = jets[static_cast<std::size_t>(n)];

    ResidualReport r1;
    r1.trials = 1;
    r1.witness = p;
    double scale = 0;
    for (double v : main_residual(gv, nabla_two_tensor(lt, gam), Lam, scale)) r1.max_abs = std::max(r1.max_abs, std::fabs(v));
    r1.scale = scale;
    rep.first.merge(r1);

    ResidualReport r2;
    r2.trials = 1;
    r2.witness = p;
    Eigen::MatrixXd nabla(n, n);
    for (int k = 0; k < n; ++k) nabla.row(k) = dLam.row(k) - (gam[static_cast<std::size_t>(k)].transpose() * Lam).transpose();
    Eigen::MatrixXd rhs = mu.value() * gv + s.B * lt.value;
    r2.max_abs = max_abs(nabla - rhs);
    r2.scale = std::max(max_abs(nabla), max_abs(rhs));
    rep.second.merge(r2);

    ResidualReport r3;
    r3.trials = 1;
    r3.witness = p;
    for (int k = 0; k < n; ++k) {
      double dmu = mu.coefficients()[static_cast<std::size_t>(1 + k)];
      r3.max_abs = std::max(r3.max_abs, std::fabs(dmu - 2 * s.B * Lam(k)));
      r3.scale = std::max({r3.scale, std::fabs(dmu), std::fabs(2 * s.B * Lam(k))});
    }
    rep.third.merge(r3);
  }
  rep.pass = rep.first.within(opt.tol) && rep.second.within(opt.tol) && rep.third.within(opt.tol);
  return rep;
}

double admissible_shift(const MetricField& g, const TensorField& L, const CheckOptions& opt) {
  require_two_tensor(L, g);
  const int n = g.dimension();
  auto pts = g.chart().sample(opt.trials, opt.seed);
  std::vector<Eigen::MatrixXd> sharp;
  for (const auto& p : pts) {
    Eigen::MatrixXd gv = g.value(p);
    auto lv = L.values(p);
    Eigen::MatrixXd Lv = Eigen::Map<const Eigen::MatrixXd>(lv.data(), n, n);
    sharp.push_back(gv.inverse() * Lv);
  }
  double best_t = 0;
  double best_quality = -1;
  for (int k = 0; k <= 200; ++k) {
    double t = (k % 2 ? 1 : -1) * 0.25 * ((k + 1) / 2);
    double quality = std::numeric_limits<double>::infinity();
    for (const auto& s : sharp) {
      Eigen::MatrixXd m = s + t * Eigen::MatrixXd::Identity(n, n);
      double norm = std::max(1.0, max_abs(m));
      quality = std::min(quality, std::fabs(m.determinant()) / std::pow(norm, n));
    }
    if (quality > best_quality + 1e-12) {
      best_quality = quality;
      best_t = t;
    }
    if (quality > 1e-2) return t;
  }
  return best_t;
}

MetricField reconstruct_metric(const MetricField& g, const TensorField& L, MetricOptions options) {
  require_two_tensor(L, g);
  const int n = g.dimension();
  for (const auto& p : g.chart().sample(20, 0)) {
    Eigen::MatrixXd gv = g.value(p);
    auto lv = L.values(p);
    Eigen::MatrixXd Lv = Eigen::Map<const Eigen::MatrixXd>(lv.data(), n, n);
    Eigen::MatrixXd sharp = gv.inverse() * Lv;
    double norm = std::max(1.0, max_abs(sharp));
    if (std::fabs(sharp.determinant()) < 1e-8 * std::pow(norm, n)) {
      throw DegenerateSolutionError("L is degenerate on the sample box; add a multiple of g first",
                                    admissible_shift(g, L));
    }
  }
  std::vector<Expr> linv;
  Expr detL;
  if (!block_inverse(L.components(), n, linv, detL)) {
    throw DegenerateSolutionError("L has no symbolic inverse", admissible_shift(g, L));
  }
  Expr scale = g.determinant() / detL;  // (det L♯)^{-1}
  std::vector<Expr> c(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<Expr> terms;
      for (int a = 0; a < n; ++a) {
        if (g(i, a).is_zero()) continue;
        for (int b = 0; b < n; ++b) {
          const Expr& li = linv[static_cast<std::size_t>(a * n + b)];
          if (li.is_zero() || g(b, j).is_zero()) continue;
          terms.push_back(g(i, a) * li * g(b, j));
        }
      }
      Expr e = scale * sum(terms);
      c[static_cast<std::size_t>(i * n + j)] = e;
      c[static_cast<std::size_t>(j * n + i)] = e;
    }
  }
  return MetricField(g.chart(), std::move(c), options);
}

DeformationReport projective_deformation(const TensorField& v, const MetricField& g, const CheckOptions& opt) {
  const int n = g.dimension();
  TensorField lie = lie_derivative_metric(v, g);
  Expr tr = trace(lie, g);
  DeformationReport rep;
  rep.phi = lie - (tr * Expr(Rational(1, n + 1))) * g.as_tensor();
  rep.main = verify_main(g, rep.phi, opt);
  rep.projective = rep.main.pass;
  Expr k = trace(rep.phi, g) * Expr(Rational(1, n));
  Program kprog = g.chart().compile({k});
  Program phiprog = g.chart().compile(rep.phi.components());
  double k0 = kprog.evaluate(g.chart().center())[0];
  auto res = sample_residual(g.chart(), opt, [&](const Point& p) {
    double kp = kprog.evaluate(p)[0];
    auto phi = phiprog.evaluate(p);
    Eigen::MatrixXd gv = g.value(p);
    std::vector<double> r;
    double scale = std::fabs(k0);
    for (int i = 0; i < n * n; ++i) {
      r.push_back(phi[static_cast<std::size_t>(i)] - k0 * gv(i / n, i % n));
      scale = std::max(scale, std::fabs(phi[static_cast<std::size_t>(i)]));
    }
    r.push_back(kp - k0);
    return std::make_pair(r, scale);
  });
  rep.homothety = res.within(opt.tol);
  rep.homothety_factor = k0;
  return rep;
}

SplittingFit fit_splitting(const TensorField& phi, const TensorField& L, double B, const MetricField& g,
                           const CheckOptions& opt) {
  const int n = g.dimension();
  Program phiprog = g.chart().compile(phi.components());
  Program lprog = g.chart().compile(L.components());
  auto pts = g.chart().sample(opt.trials, opt.seed);
  std::vector<double> cs;
  for (const auto& p : pts) {
    auto ph = phiprog.evaluate(p);
    auto lv = lprog.evaluate(p);
    Eigen::MatrixXd gv = g.value(p);
    double num = 0;
    double den = 0;
    for (int i = 0; i < n * n; ++i) {
      double r = ph[static_cast<std::size_t>(i)] - 2 * B * lv[static_cast<std::size_t>(i)];
      num += r * gv(i / n, i % n);
      den += gv(i / n, i % n) * gv(i / n, i % n);
    }
    cs.push_back(-num / den);
  }
  SplittingFit fit;
  for (double c : cs) fit.C += c;
  fit.C /= static_cast<double>(cs.size());
  for (double c : cs) fit.C_spread = std::max(fit.C_spread, std::fabs(c - fit.C));
  fit.residual = sample_residual(g.chart(), opt, [&](const Point& p) {
    auto ph = phiprog.evaluate(p);
    auto lv = lprog.evaluate(p);
    Eigen::MatrixXd gv = g.value(p);
    std::vector<double> r;
    double scale = std::fabs(fit.C);
    for (int i = 0; i < n * n; ++i) {
      r.push_back(ph[static_cast<std::size_t>(i)] - 2 * B * lv[static_cast<std::size_t>(i)] + fit.C * gv(i / n, i % n));
      scale = std::max({scale, std::fabs(ph[static_cast<std::size_t>(i)]), std::fabs(2 * B * lv[static_cast<std::size_t>(i)])});
    }
    return std::make_pair(r, scale);
  });
  return fit;
}

namespace {

Eigen::VectorXd christoffel_contract(const MetricField& g, const Point& x, const Eigen::VectorXd& v) {
  MetricJet mj = g.jet(x, 1);
  const auto n = static_cast<int>(v.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) out += v(i) * (mj.gamma[static_cast<std::size_t>(i)].value() * v);
  return out;
}

bool inside(const Chart& chart, const Eigen::VectorXd& x) {
  for (int i = 0; i < x.size(); ++i) {
    const auto& iv = chart.box()[static_cast<std::size_t>(i)];
    if (x(i) < iv.lo || x(i) > iv.hi) return false;
  }
  return true;
}

}  // namespace

GeodesicReport geodesic_projective_test(const MetricField& g, const MetricField& gbar,
                                        const std::vector<GeodesicSeed>& seeds, const GeodesicOptions& opt) {
  if (g.chart().coordinates() != gbar.chart().coordinates()) throw std::invalid_argument("chart mismatch");
  if (!(opt.step > 1e-12)) throw std::invalid_argument("geodesic step size underflow");
  const int n = g.dimension();
  GeodesicReport rep;
  auto to_point = [](const Eigen::VectorXd& x) { return Point(x.data(), x.data() + x.size()); };
  for (const auto& seed : seeds) {
    SeedResult sr;
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(seed.x.data(), n);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(seed.v.data(), n);
    for (int step = 0; step <= opt.steps; ++step) {
      Point p = to_point(x);
      Eigen::VectorXd a = christoffel_contract(g, p, v);
      Eigen::VectorXd abar = christoffel_contract(gbar, p, v);
      Eigen::VectorXd w = abar - a;
      double worst = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) worst = std::max(worst, std::fabs(v(i) * w(j) - v(j) * w(i)));
      }
      double scale = v.norm() * std::max({v.squaredNorm(), a.norm(), abar.norm()});
      double ratio = scale > 0 ? worst / scale : 0;
      sr.max_ratio = std::max(sr.max_ratio, ratio);
      if (ratio > opt.tol) sr.pass = false;
      sr.steps_taken = step;
      if (step == opt.steps) break;
      // RK4 on (x, v) with x'' = -Γ(x)(x', x').
      const double h = opt.step;
      auto acc = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& vv) {
        return Eigen::VectorXd(-christoffel_contract(g, to_point(xx), vv));
      };
      Eigen::VectorXd k1x = v;
      Eigen::VectorXd k1v = -a;
      Eigen::VectorXd x2 = x + 0.5 * h * k1x;
      Eigen::VectorXd v2 = v + 0.5 * h * k1v;
      if (!inside(g.chart(), x2)) {
        sr.left_chart = true;
        break;
      }
      Eigen::VectorXd k2x = v2;
      Eigen::VectorXd k2v = acc(x2, v2);
      Eigen::VectorXd x3 = x + 0.5 * h * k2x;
      Eigen::VectorXd v3 = v + 0.5 * h * k2v;
      if (!inside(g.chart(), x3)) {
        sr.left_chart = true;
        break;
      }
      Eigen::VectorXd k3x = v3;
      Eigen::VectorXd k3v = acc(x3, v3);
      Eigen::VectorXd x4 = x + h * k3x;
      Eigen::VectorXd v4 = v + h * k3v;
      if (!inside(g.chart(), x4)) {
        sr.left_chart = true;
        break;
      }
      Eigen::VectorXd k4x = v4;
      Eigen::VectorXd k4v = acc(x4, v4);
      Eigen::VectorXd xn = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      Eigen::VectorXd vn = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
      if (!inside(g.chart(), xn)) {
        sr.left_chart = true;
        break;
      }
      x = xn;
      v = vn;
    }
    rep.worst_ratio = std::max(rep.worst_ratio, sr.max_ratio);
    rep.pass = rep.pass && sr.pass;
    rep.seeds.push_back(sr);
  }
  return rep;
}

std::vector<GeodesicSeed> random_seeds(const Chart& chart, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<GeodesicSeed> out;
  // Start in the middle half of the box so trajectories have room.
  std::vector<Interval> inner;
  for (const auto& iv : chart.box()) {
    double q = 0.25 * (iv.hi - iv.lo);
    inner.push_back({iv.lo + q, iv.hi - q});
  }
  Chart core = chart.with_box(inner);
  for (const auto& p : core.sample(count, rng())) {
    std::vector<double> v(p.size());
    double norm = 0;
    for (double& c : v) {
      c = normal(rng);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    for (double& c : v) c /= norm;
    out.push_back({p, v});
  }
  return out;
}

}  // namespace einmob
