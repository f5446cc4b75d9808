#include "einmob/curvature.hpp"

#include <cmath>
#include <sstream>

#include "einmob/calculus.hpp"

namespace einmob {

namespace {

std::size_t i3(int n, int a, int b, int c) { return static_cast<std::size_t>((a * n + b) * n + c); }
std::size_t i4(int n, int a, int b, int c, int d) { return static_cast<std::size_t>(((a * n + b) * n + c) * n + d); }

}  // namespace

CurvatureSet christoffels(const MetricField& g) {
  const int n = g.dimension();
  const Chart& chart = g.chart();
  CurvatureSet cs;
  cs.n = n;
  // dg[c][a][b] = ∂_c g_ab
  std::vector<Expr> dg(static_cast<std::size_t>(n * n * n));
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        Expr d = chart.derivative(g(a, b), c);
        dg[i3(n, c, a, b)] = d;
        dg[i3(n, c, b, a)] = d;
      }
    }
  }
  cs.gamma.assign(static_cast<std::size_t>(n * n * n), Expr(0));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<Expr> lowered(static_cast<std::size_t>(n));
      for (int l = 0; l < n; ++l) {
        lowered[static_cast<std::size_t>(l)] =
            Expr(Rational(1, 2)) * (dg[i3(n, i, j, l)] + dg[i3(n, j, i, l)] - dg[i3(n, l, i, j)]);
      }
      for (int k = 0; k < n; ++k) {
        std::vector<Expr> terms;
        for (int l = 0; l < n; ++l) {
          const Expr& inv = g.inverse(k, l);
          if (inv.is_zero() || lowered[static_cast<std::size_t>(l)].is_zero()) continue;
          terms.push_back(inv * lowered[static_cast<std::size_t>(l)]);
        }
        Expr v = sum(terms);
        cs.gamma[i3(n, k, i, j)] = v;
        cs.gamma[i3(n, k, j, i)] = v;
      }
    }
  }
  return cs;
}

CurvatureSet curvature(const MetricField& g) {
  CurvatureSet cs = christoffels(g);
  const int n = cs.n;
  const Chart& chart = g.chart();
  // dgamma[i][l][j][k] = ∂_i Γ^l_{jk}
  std::vector<Expr> dgamma(static_cast<std::size_t>(n * n * n * n));
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
          Expr d = chart.derivative(cs.christoffel(l, j, k), i);
          dgamma[i4(n, i, l, j, k)] = d;
          dgamma[i4(n, i, l, k, j)] = d;
        }
      }
    }
  }
  cs.riemann.assign(static_cast<std::size_t>(n * n * n * n), Expr(0));
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          std::vector<Expr> terms{dgamma[i4(n, i, l, j, k)], -dgamma[i4(n, j, l, i, k)]};
          for (int m = 0; m < n; ++m) {
            const Expr& a = cs.christoffel(l, i, m);
            const Expr& b = cs.christoffel(m, j, k);
            if (!a.is_zero() && !b.is_zero()) terms.push_back(a * b);
            const Expr& c = cs.christoffel(l, j, m);
            const Expr& d = cs.christoffel(m, i, k);
            if (!c.is_zero() && !d.is_zero()) terms.push_back(-(c * d));
          }
          Expr r = sum(terms);
          cs.riemann[i4(n, l, i, j, k)] = r;
          cs.riemann[i4(n, l, j, i, k)] = -r;
        }
      }
    }
  }
  cs.ricci.assign(static_cast<std::size_t>(n * n), Expr(0));
  std::vector<Expr> scal_terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<Expr> terms;
      for (int k = 0; k < n; ++k) terms.push_back(cs.riem(k, k, i, j));
      cs.ricci[static_cast<std::size_t>(i * n + j)] = sum(terms);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Expr& inv = g.inverse(i, j);
      if (!inv.is_zero()) scal_terms.push_back(inv * cs.ric(i, j));
    }
  }
  cs.scal = sum(scal_terms);
  cs.has_riemann = true;
  return cs;
}

double PointCurvature::riem_lower(int l, int i, int j, int k) const {
  double s = 0;
  for (int m = 0; m < n; ++m) s += g(l, m) * riem(m, i, j, k);
  return s;
}

PointCurvature point_curvature(const MetricField& g, const Point& p) { return point_curvature(g.jet(p, 2)); }

PointCurvature point_curvature(const MetricJet& jet) {
  const int n = jet.g.rows();
  PointCurvature pc;
  pc.n = n;
  pc.point = jet.point;
  pc.g = jet.g.value();
  pc.ginv = jet.ginv.value();
  pc.gamma.assign(static_cast<std::size_t>(n * n * n), 0.0);
  std::vector<Eigen::MatrixXd> gam;  // gam[i](a,c) = Γ^a_{ic}
  std::vector<std::vector<Eigen::MatrixXd>> dgam(static_cast<std::size_t>(n));  // dgam[i][j](l,k) = ∂_i Γ^l_{jk}
  for (int i = 0; i < n; ++i) gam.push_back(jet.gamma[static_cast<std::size_t>(i)].value());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) dgam[static_cast<std::size_t>(i)].push_back(jet.gamma[static_cast<std::size_t>(j)].derivative(i).value());
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) pc.gamma[i3(n, k, i, j)] = gam[static_cast<std::size_t>(i)](k, j);
    }
  }
  pc.riemann.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // R(i,j) as a matrix (l,k)
      Eigen::MatrixXd r = dgam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                          dgam[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] +
                          gam[static_cast<std::size_t>(i)] * gam[static_cast<std::size_t>(j)] -
                          gam[static_cast<std::size_t>(j)] * gam[static_cast<std::size_t>(i)];
      for (int l = 0; l < n; ++l) {
        for (int k = 0; k < n; ++k) pc.riemann[i4(n, l, i, j, k)] = r(l, k);
      }
    }
  }
  pc.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += pc.riem(k, k, i, j);
      pc.ricci(i, j) = s;
    }
  }
  pc.scal = (pc.ginv.cwiseProduct(pc.ricci)).sum();
  return pc;
}

SignatureCounts signature(const MetricField& g, const Point& p) {
  Eigen::MatrixXd gv = g.value(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gv, Eigen::EigenvaluesOnly);
  double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  SignatureCounts s;
  for (int i = 0; i < gv.rows(); ++i) {
    double e = es.eigenvalues()(i);
    if (!(std::fabs(e) >= 1e-10 * norm)) throw DegenerateMetricError("near-zero eigenvalue of the metric", p);
    (e > 0 ? s.plus : s.minus)++;
  }
  return s;
}

SignatureCounts signature(const MetricField& g, std::size_t trials, std::uint64_t seed) {
  auto pts = g.chart().sample(trials, seed);
  SignatureCounts first = signature(g, pts.at(0));
  for (const auto& p : pts) {
    if (!(signature(g, p) == first)) throw std::runtime_error("metric signature varies over the sample box");
  }
  return first;
}

EinsteinReport is_einstein(const MetricField& g, const CheckOptions& opt) {
  const int n = g.dimension();
  EinsteinReport rep;
  double scal0 = 0;
  double scal_sum = 0;
  bool first = true;
  bool ok = true;
  for (const auto& p : g.chart().sample(opt.trials, opt.seed)) {
    PointCurvature pc = point_curvature(g, p);
    ++rep.trials;
    scal_sum += pc.scal;
    double scale = pc.ricci.cwiseAbs().maxCoeff() + pc.g.cwiseAbs().maxCoeff() * std::fabs(pc.scal) / n;
    Eigen::MatrixXd res = pc.ricci - (pc.scal / n) * pc.g;
    Eigen::Index ri = 0;
    Eigen::Index rj = 0;
    double r = res.cwiseAbs().maxCoeff(&ri, &rj);
    if (r > rep.max_residual) rep.max_residual = r;
    if (first) {
      scal0 = pc.scal;
      first = false;
    }
    double spread = std::fabs(pc.scal - scal0);
    rep.scal_spread = std::max(rep.scal_spread, spread);
    if (ok && r > opt.tol * (1 + scale)) {
      ok = false;
      rep.witness = p;
      std::ostringstream os;
      os << "Ric - (Scal/n) g at (" << ri << "," << rj << ") = " << res(ri, rj);
      rep.witness_component = os.str();
    }
    if (ok && spread > opt.tol * (1 + std::fabs(scal0) + std::fabs(pc.scal))) {
      ok = false;
      rep.witness = p;
      std::ostringstream os;
      os << "Scal varies: " << pc.scal << " vs " << scal0;
      rep.witness_component = os.str();
    }
  }
  rep.scal = scal_sum / static_cast<double>(rep.trials);
  rep.einstein = ok;
  if (ok) rep.B = -rep.scal / (n * (n - 1));
  return rep;
}

ConstantCurvatureReport is_constant_curvature(const MetricField& g, const CheckOptions& opt) {
  const int n = g.dimension();
  ConstantCurvatureReport rep;
  rep.constant = true;
  bool first = true;
  for (const auto& p : g.chart().sample(opt.trials, opt.seed)) {
    PointCurvature pc = point_curvature(g, p);
    double c = pc.scal / (n * (n - 1));
    if (first) {
      rep.c = c;
      first = false;
    }
    double scale = 0;
    double worst = 0;
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            double lhs = pc.riem_lower(l, i, j, k);
            double model = c * (pc.g(l, i) * pc.g(j, k) - pc.g(l, j) * pc.g(i, k));
            scale = std::max({scale, std::fabs(lhs), std::fabs(model)});
            worst = std::max(worst, std::fabs(lhs - model));
          }
        }
      }
    }
    rep.max_residual = std::max(rep.max_residual, worst);
    if (rep.constant && (worst > opt.tol * (1 + scale) || std::fabs(c - rep.c) > opt.tol * (1 + std::fabs(c)))) {
      rep.constant = false;
      rep.witness = p;
    }
  }
  return rep;
}

IdentityReport curvature_identities(const MetricField& g, const CheckOptions& opt) {
  const int n = g.dimension();
  IdentityReport rep;
  for (const auto& p : g.chart().sample(opt.trials, opt.seed)) {
    PointCurvature pc = point_curvature(g, p);
    for (double v : pc.riemann) rep.scale = std::max(rep.scale, std::fabs(v));
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            double b = pc.riem(l, i, j, k) + pc.riem(l, j, k, i) + pc.riem(l, k, i, j);
            rep.bianchi = std::max(rep.bianchi, std::fabs(b));
          }
        }
      }
    }
    rep.ricci_asymmetry = std::max(rep.ricci_asymmetry, (pc.ricci - pc.ricci.transpose()).cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace einmob
