#include "einmob/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "einmob/tensor_calculus.hpp"

namespace einmob {

namespace {

// One contribution coef * source to A_i(row, col); the source is Γ^a_{ib},
// g_ab or the constant 1.
struct Term {
  enum Source { gamma, metric, one } src;
  int row, col, a, b;
  double coef;
};

// Entry (row, col) of the symmetric-tensor lift b ↦ X b + b X^T receives
// coef * X(u, v).
struct LiftEntry {
  int row, col, u, v;
};

std::vector<LiftEntry> lift_table(int n) {
  std::vector<LiftEntry> out;
  for (int c = 0; c < n; ++c) {
    for (int d = c; d < n; ++d) {
      const int col = pair_index(n, c, d);
      std::vector<std::pair<int, int>> e{{c, d}};
      if (c != d) e.emplace_back(d, c);
      for (auto [m, b] : e) {
        // (X E)_{ab} = X(a, m) E(m, b)
        for (int a = 0; a <= b; ++a) out.push_back({pair_index(n, a, b), col, a, m});
      }
      for (auto [a, m] : e) {
        // (E X^T)_{ab} = E(a, m) X(b, m)
        for (int b = a; b < n; ++b) out.push_back({pair_index(n, a, b), col, b, m});
      }
    }
  }
  return out;
}

Eigen::MatrixXd lift_algebra(const Eigen::MatrixXd& x, const std::vector<LiftEntry>& table, int N) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, N);
  for (const auto& e : table) out(e.row, e.col) += x(e.u, e.v);
  return out;
}

// b ↦ P b P^T on packed symmetric matrices.
Eigen::MatrixXd lift_group(const Eigen::MatrixXd& p) {
  const auto n = static_cast<int>(p.rows());
  const int N = n * (n + 1) / 2;
  Eigen::MatrixXd out(N, N);
  for (int c = 0; c < n; ++c) {
    for (int d = c; d < n; ++d) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
      e(c, d) = 1;
      e(d, c) = 1;
      Eigen::MatrixXd img = p * e * p.transpose();
      for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) out(pair_index(n, a, b), pair_index(n, c, d)) = img(a, b);
      }
    }
  }
  return out;
}

// Terms of A_i for the connection actually integrated: symmetric tensors are
// handled through the one-form connection and lifted afterwards.
std::vector<Term> connection_terms(FiberKind kind, int n, int i, double B) {
  std::vector<Term> t;
  switch (kind) {
    case FiberKind::vector:
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) t.push_back({Term::gamma, a, b, a, b, 1.0});
      }
      break;
    case FiberKind::oneform:
    case FiberKind::sym2:
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) t.push_back({Term::gamma, a, b, b, a, -1.0});
      }
      break;
    case FiberKind::prolongation: {
      const int P = n * (n + 1) / 2;
      const int mu = P + n;
      for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
          const int row = pair_index(n, a, b);
          for (int c = 0; c < n; ++c) {
            t.push_back({Term::gamma, row, pair_index(n, c, b), c, a, -1.0});
            t.push_back({Term::gamma, row, pair_index(n, a, c), c, b, -1.0});
          }
          t.push_back({Term::metric, row, P + b, i, a, -1.0});
          t.push_back({Term::metric, row, P + a, i, b, -1.0});
        }
      }
      for (int a = 0; a < n; ++a) {
        for (int c = 0; c < n; ++c) t.push_back({Term::gamma, P + a, P + c, c, a, -1.0});
        t.push_back({Term::metric, P + a, mu, i, a, -1.0});
        if (B != 0) t.push_back({Term::one, P + a, pair_index(n, i, a), 0, 0, -B});
      }
      if (B != 0) t.push_back({Term::one, mu, P + i, 0, 0, -2 * B});
      break;
    }
  }
  return t;
}

int work_dimension(FiberKind kind, int n) {
  return kind == FiberKind::prolongation ? n * (n + 1) / 2 + n + 1 : n;
}

Eigen::MatrixXd assemble_values(const std::vector<Term>& terms, int W, const Eigen::MatrixXd& gamma_i,
                                const Eigen::MatrixXd& g) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(W, W);
  for (const auto& t : terms) {
    double s = t.src == Term::gamma ? gamma_i(t.a, t.b) : t.src == Term::metric ? g(t.a, t.b) : 1.0;
    A(t.row, t.col) += t.coef * s;
  }
  return A;
}

MatJet assemble_jets(const std::vector<Term>& terms, int W, const MatJet& gamma_i, const MatJet& g, int order) {
  const JetSpace* space = gamma_i.space();
  MatJet A(space, order, W, W);
  for (const auto& t : terms) {
    if (t.src == Term::one) {
      A.ref(t.row, t.col).coefficients()[0] += t.coef;
      continue;
    }
    const MatJet& m = t.src == Term::gamma ? gamma_i : g;
    if (!m.nonzero(t.a, t.b)) continue;
    const Jet& s = m.at(t.a, t.b);
    auto& dst = A.ref(t.row, t.col).coefficients();
    const auto& src = s.coefficients();
    const std::size_t len = std::min(dst.size(), src.size());
    for (std::size_t k = 0; k < len; ++k) dst[k] += t.coef * src[k];
  }
  return A;
}

// Connection matrices of the integrated ("work") connection at p.
std::vector<MatJet> work_jets(const LinearConnectionBundle& b, const Point& p, int order) {
  const int n = b.metric().dimension();
  MetricJet mj = b.metric().jet(p, order + 1);
  const int W = work_dimension(b.kind(), n);
  std::vector<MatJet> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(assemble_jets(connection_terms(b.kind(), n, i, b.B()), W, mj.gamma[static_cast<std::size_t>(i)],
                                mj.g, order));
  }
  return out;
}

std::vector<Eigen::MatrixXd> work_values(const LinearConnectionBundle& b, const Point& p,
                                         const std::vector<std::vector<Term>>& terms) {
  const int n = b.metric().dimension();
  MetricJet mj = b.metric().jet(p, 1);
  const int W = work_dimension(b.kind(), n);
  Eigen::MatrixXd g = mj.g.value();
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(assemble_values(terms[static_cast<std::size_t>(i)], W, mj.gamma[static_cast<std::size_t>(i)].value(), g));
  }
  return out;
}

// Incremental row space of a stacked constraint matrix, kept as the R factor
// of a QR decomposition.
class RowSpace {
 public:
  explicit RowSpace(int N) : N_(N), R_(0, N) {}

  void add(const Eigen::MatrixXd& rows) {
    if (rows.rows() == 0) return;
    Eigen::MatrixXd stacked(R_.rows() + rows.rows(), N_);
    stacked << R_, rows;
    if (stacked.rows() <= N_) {
      R_ = stacked;
      return;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
    R_ = qr.matrixQR().topRows(N_).triangularView<Eigen::Upper>();
  }

  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return R_; }

 private:
  int N_;
  Eigen::MatrixXd R_;
};

struct RankResult {
  int rank = 0;
  double threshold = 0;
  double gap = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd kernel;  // N x (N - rank)
};

RankResult numerical_rank(const Eigen::MatrixXd& R, int N, double floor_abs, double rel_tol, bool want_kernel) {
  RankResult out;
  Eigen::MatrixXd M = R.rows() ? R : Eigen::MatrixXd::Zero(1, N);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, want_kernel ? Eigen::ComputeFullV : 0);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  out.threshold = std::max(rel_tol * smax, floor_abs);
  double kept_min = std::numeric_limits<double>::infinity();
  double dropped_max = 0;
  for (int k = 0; k < s.size(); ++k) {
    if (s(k) > out.threshold) {
      ++out.rank;
      kept_min = std::min(kept_min, s(k));
    } else {
      dropped_max = std::max(dropped_max, s(k));
    }
  }
  if (out.rank > 0) out.gap = kept_min / std::max({dropped_max, out.threshold, std::numeric_limits<double>::min()});
  if (want_kernel) out.kernel = svd.matrixV().rightCols(N - out.rank);
  return out;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<double> section_values(const Program& prog, const Point& p) { return prog.evaluate(p); }

}  // namespace

std::string fiber_name(FiberKind k) {
  switch (k) {
    case FiberKind::prolongation: return "prolongation";
    case FiberKind::sym2: return "sym2";
    case FiberKind::oneform: return "oneform";
    case FiberKind::vector: return "vector";
  }
  return "?";
}

int pair_index(int n, int a, int b) {
  if (a > b) std::swap(a, b);
  return a * n - a * (a - 1) / 2 + (b - a);
}

LinearConnectionBundle::LinearConnectionBundle(MetricField g, FiberKind kind, double B)
    : g_(std::move(g)), kind_(kind), B_(B) {
  const int n = g_.dimension();
  switch (kind) {
    case FiberKind::prolongation: N_ = n * (n + 1) / 2 + n + 1; break;
    case FiberKind::sym2: N_ = n * (n + 1) / 2; break;
    case FiberKind::oneform:
    case FiberKind::vector: N_ = n; break;
  }
}

std::vector<MatJet> LinearConnectionBundle::connection_jets(const Point& p, int order) const {
  std::vector<MatJet> w = work_jets(*this, p, order);
  if (kind_ != FiberKind::sym2) return w;
  const int n = g_.dimension();
  auto table = lift_table(n);
  std::vector<MatJet> out;
  for (const auto& x : w) {
    MatJet A(x.space(), x.order(), N_, N_);
    for (const auto& e : table) {
      if (!x.nonzero(e.u, e.v)) continue;
      A.ref(e.row, e.col) += x.at(e.u, e.v);
    }
    out.push_back(std::move(A));
  }
  return out;
}

std::vector<Eigen::MatrixXd> LinearConnectionBundle::connection_values(const Point& p) const {
  const int n = g_.dimension();
  std::vector<std::vector<Term>> terms;
  for (int i = 0; i < n; ++i) terms.push_back(connection_terms(kind_, n, i, B_));
  auto w = work_values(*this, p, terms);
  if (kind_ != FiberKind::sym2) return w;
  auto table = lift_table(n);
  std::vector<Eigen::MatrixXd> out;
  for (const auto& x : w) out.push_back(lift_algebra(x, table, N_));
  return out;
}

std::vector<std::vector<Expr>> LinearConnectionBundle::symbolic_connection() const {
  if (!g_.has_symbolic_inverse()) throw std::logic_error("symbolic connection needs a symbolic metric inverse");
  const int n = g_.dimension();
  CurvatureSet cs = christoffels(g_);
  const int W = work_dimension(kind_, n);
  std::vector<std::vector<Expr>> out;
  auto table = lift_table(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<Expr>> acc(static_cast<std::size_t>(W * W));
    for (const auto& t : connection_terms(kind_, n, i, B_)) {
      Expr src = t.src == Term::gamma ? cs.christoffel(t.a, i, t.b) : t.src == Term::metric ? g_(t.a, t.b) : Expr(1);
      if (src.is_zero()) continue;
      Expr coef = Expr(rationalize(t.coef));
      acc[static_cast<std::size_t>(t.row * W + t.col)].push_back(coef * src);
    }
    std::vector<Expr> m(static_cast<std::size_t>(W * W));
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = sum(acc[k]);
    if (kind_ == FiberKind::sym2) {
      std::vector<std::vector<Expr>> lifted(static_cast<std::size_t>(N_ * N_));
      for (const auto& e : table) {
        const Expr& x = m[static_cast<std::size_t>(e.u * W + e.v)];
        if (!x.is_zero()) lifted[static_cast<std::size_t>(e.row * N_ + e.col)].push_back(x);
      }
      m.assign(static_cast<std::size_t>(N_ * N_), Expr(0));
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = sum(lifted[k]);
    }
    out.push_back(std::move(m));
  }
  return out;
}

LinearConnectionBundle build_prolongation(const MetricField& g, double B, const CheckOptions& opt) {
  EinsteinReport er = is_einstein(g, opt);
  if (!er.einstein) {
    throw BMismatchError("prolongation needs an Einstein metric; Ricci residual " + std::to_string(er.max_residual) +
                         " at component " + er.witness_component);
  }
  if (std::fabs(er.B - B) > 1e-6 * (1 + std::fabs(er.B))) {
    throw BMismatchError("B = " + std::to_string(B) + " does not match -Scal/(n(n-1)) = " + std::to_string(er.B));
  }
  return LinearConnectionBundle(g, FiberKind::prolongation, B);
}

std::vector<Expr> prolongation_section(const SolutionTriple& s) {
  const int n = s.L.chart().dimension();
  std::vector<Expr> out;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) out.push_back(s.L[{a, b}]);
  }
  for (int a = 0; a < n; ++a) out.push_back(s.Lambda[{a}]);
  out.push_back(s.mu);
  return out;
}

std::vector<Expr> sym2_section(const TensorField& t) {
  if (t.up() != 0 || t.down() != 2) throw std::invalid_argument("expected a (0,2) tensor");
  const int n = t.chart().dimension();
  std::vector<Expr> out;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) out.push_back(t[{a, b}]);
  }
  return out;
}

ResidualReport section_residual(const LinearConnectionBundle& bundle, const std::vector<Expr>& section,
                                const CheckOptions& opt) {
  const int N = bundle.fiber_dimension();
  const int n = bundle.metric().dimension();
  if (static_cast<int>(section.size()) != N) throw std::invalid_argument("section has the wrong fiber dimension");
  Program prog = bundle.chart().compile(section);
  return sample_residual(bundle.chart(), opt, [&](const Point& p) {
    auto jets = prog.evaluate_jet(p, 1);
    Eigen::VectorXd s(N);
    Eigen::MatrixXd ds(N, n);
    for (int r = 0; r < N; ++r) {
      s(r) = jets[static_cast<std::size_t>(r)].value();
      for (int i = 0; i < n; ++i) ds(r, i) = jets[static_cast<std::size_t>(r)].coefficients()[static_cast<std::size_t>(1 + i)];
    }
    auto A = bundle.connection_values(p);
    std::vector<double> res;
    double scale = 0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd as = A[static_cast<std::size_t>(i)] * s;
      Eigen::VectorXd r = ds.col(i) + as;
      scale = std::max({scale, ds.col(i).cwiseAbs().maxCoeff(), as.cwiseAbs().maxCoeff()});
      res.insert(res.end(), r.data(), r.data() + r.size());
    }
    return std::make_pair(res, scale);
  });
}

MobilityReport kernel_dimension(const LinearConnectionBundle& bundle, const KernelOptions& opt) {
  if (opt.max_order < 1) throw std::invalid_argument("max order must be at least 1");
  const int n = bundle.metric().dimension();
  const int N = bundle.fiber_dimension();
  const bool lifted = bundle.kind() == FiberKind::sym2;
  const auto table = lifted ? lift_table(n) : std::vector<LiftEntry>{};
  auto to_fiber = [&](const Eigen::MatrixXd& x) { return lifted ? lift_algebra(x, table, N) : x; };

  MobilityReport rep;
  rep.method = "kernel";
  rep.fiber = bundle.kind();
  rep.N = N;
  rep.rank_sequence.assign(static_cast<std::size_t>(opt.max_order + 1), 0);
  rep.spectral_gap = std::numeric_limits<double>::infinity();

  auto points = bundle.chart().sample(opt.samples, opt.seed);
  rep.samples = points.size();
  int best_rank = -1;
  for (const auto& p : points) {
    const int m = opt.max_order;
    std::vector<MatJet> A = work_jets(bundle, p, m + 1);
    // Absolute floor for "zero": curvature-sized quantities built from A.
    double ref = 0;
    for (int i = 0; i < n; ++i) {
      double a = max_abs(A[static_cast<std::size_t>(i)].value());
      double da = 0;
      for (int j = 0; j < n; ++j) da = std::max(da, max_abs(A[static_cast<std::size_t>(i)].derivative(j).value()));
      ref = std::max(ref, da + a * a);
    }
    const double floor_abs = opt.rank_tol * ref;

    struct Item {
      MatJet x;
      int last;
    };
    std::vector<Item> level;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        MatJet K = A[static_cast<std::size_t>(j)].derivative(i);
        K -= A[static_cast<std::size_t>(i)].derivative(j);
        K += commutator(A[static_cast<std::size_t>(i)], A[static_cast<std::size_t>(j)]);
        level.push_back({std::move(K), 0});
      }
    }
    RowSpace rows(N);
    RankResult rr;
    for (int r = 0; r <= m; ++r) {
      for (const auto& it : level) rows.add(to_fiber(it.x.value()));
      const bool last = r == m;
      rr = numerical_rank(rows.matrix(), N, floor_abs, opt.rank_tol, last);
      rep.rank_sequence[static_cast<std::size_t>(r)] = std::max(rep.rank_sequence[static_cast<std::size_t>(r)], rr.rank);
      if (last) break;
      std::vector<Item> next;
      for (const auto& it : level) {
        for (int k = it.last; k < n; ++k) {
          MatJet y = it.x.derivative(k);
          y += commutator(A[static_cast<std::size_t>(k)], it.x);
          next.push_back({std::move(y), k});
        }
      }
      level = std::move(next);
    }
    rep.spectral_gap = std::min(rep.spectral_gap, rr.gap);
    if (rr.rank > best_rank) {
      best_rank = rr.rank;
      rep.basis_point = p;
      rep.kernel_basis = rr.kernel;
      rep.threshold = rr.threshold;
    }
  }
  const auto& rs = rep.rank_sequence;
  rep.D = N - rs.back();
  rep.stabilized = rs.size() >= 2 && rs[rs.size() - 1] == rs[rs.size() - 2];
  rep.order = static_cast<int>(rs.size()) - 1;
  for (std::size_t d = 1; d < rs.size(); ++d) {
    if (rs[d] == rs[d - 1] && rs[d] == rs.back()) {
      rep.order = static_cast<int>(d);
      break;
    }
  }
  return rep;
}

MobilityReport loop_transport_dimension(const LinearConnectionBundle& bundle, const LoopOptions& opt) {
  const Chart& chart = bundle.chart();
  const int n = bundle.metric().dimension();
  const int N = bundle.fiber_dimension();
  const bool lifted = bundle.kind() == FiberKind::sym2;
  const int W = work_dimension(bundle.kind(), n);
  std::vector<std::vector<Term>> terms;
  for (int i = 0; i < n; ++i) terms.push_back(connection_terms(bundle.kind(), n, i, bundle.B()));

  const Point p0 = chart.center();
  const auto& box = chart.box();
  std::mt19937_64 rng(opt.seed ^ 0x5851f42d4c957f2dULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Closed piecewise-linear paths: p0 -> q, rectangle at q in plane (i, j), q -> p0.
  std::vector<std::vector<Point>> loops;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (std::size_t l = 0; l < opt.loops_per_plane; ++l) {
        const double a = opt.size_fraction * (box[static_cast<std::size_t>(i)].hi - box[static_cast<std::size_t>(i)].lo);
        const double b = opt.size_fraction * (box[static_cast<std::size_t>(j)].hi - box[static_cast<std::size_t>(j)].lo);
        Point q(static_cast<std::size_t>(n));
        for (int c = 0; c < n; ++c) {
          const auto& iv = box[static_cast<std::size_t>(c)];
          double lo = iv.lo;
          double hi = iv.hi;
          if (c == i) hi -= a;
          if (c == j) hi -= b;
          q[static_cast<std::size_t>(c)] = lo + (hi - lo) * (0.1 + 0.8 * unit(rng));
        }
        Point q1 = q;
        q1[static_cast<std::size_t>(i)] += a;
        Point q2 = q1;
        q2[static_cast<std::size_t>(j)] += b;
        Point q3 = q;
        q3[static_cast<std::size_t>(j)] += b;
        loops.push_back({p0, q, q1, q2, q3, q, p0});
      }
    }
  }

  auto transport = [&](const std::vector<Point>& path, double h) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(W, W);
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
      Eigen::Map<const Eigen::VectorXd> x0(path[s].data(), n);
      Eigen::Map<const Eigen::VectorXd> x1(path[s + 1].data(), n);
      Eigen::VectorXd d = x1 - x0;
      const double len = d.cwiseAbs().maxCoeff();
      if (len == 0) continue;
      const int steps = std::max(4, static_cast<int>(std::ceil(len / h)));
      const double dt = 1.0 / steps;
      auto rhs = [&](double t, const Eigen::MatrixXd& Y) {
        Eigen::VectorXd x = x0 + t * d;
        Point pt(x.data(), x.data() + n);
        auto A = work_values(bundle, pt, terms);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(W, W);
        for (int i = 0; i < n; ++i) {
          if (d(i) != 0) M += d(i) * A[static_cast<std::size_t>(i)];
        }
        return Eigen::MatrixXd(-M * Y);
      };
      for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        Eigen::MatrixXd k1 = rhs(t, P);
        Eigen::MatrixXd k2 = rhs(t + dt / 2, P + dt / 2 * k1);
        Eigen::MatrixXd k3 = rhs(t + dt / 2, P + dt / 2 * k2);
        Eigen::MatrixXd k4 = rhs(t + dt, P + dt * k3);
        P += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      }
    }
    return lifted ? lift_group(P) : P;
  };

  MobilityReport rep;
  rep.method = "loop-transport";
  rep.fiber = bundle.kind();
  rep.N = N;
  rep.samples = loops.size();
  rep.basis_point = p0;
  RowSpace rows(N);
  double floor = 0;
  for (const auto& loop : loops) {
    Eigen::MatrixXd H = transport(loop, opt.step);
    Eigen::MatrixXd H2 = transport(loop, opt.step / 2);
    floor = std::max(floor, max_abs(H - H2));
    rows.add(H2 - Eigen::MatrixXd::Identity(N, N));
  }
  rep.error_floor = floor;
  RankResult rr = numerical_rank(rows.matrix(), N, 100 * floor * std::sqrt(static_cast<double>(loops.size())),
                                 opt.rank_tol, true);
  rep.D = N - rr.rank;
  rep.rank_sequence = {rr.rank};
  rep.threshold = rr.threshold;
  rep.spectral_gap = rr.gap;
  rep.kernel_basis = rr.kernel;
  rep.stabilized = true;
  return rep;
}

void match_known(MobilityReport& rep, const LinearConnectionBundle& bundle,
                 const std::vector<std::vector<Expr>>& sections, std::size_t points) {
  const int N = bundle.fiber_dimension();
  rep.known_count = sections.size();
  rep.known_coefficients.clear();
  rep.known_residual = 0;
  if (sections.empty()) {
    rep.known_rank = 0;
    rep.exact = false;
    return;
  }
  auto pts = bundle.chart().sample(points, 0x6b6e6f776eULL);
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(sections.size()), static_cast<Eigen::Index>(N * pts.size()));
  for (std::size_t s = 0; s < sections.size(); ++s) {
    if (static_cast<int>(sections[s].size()) != N) throw std::invalid_argument("known section has the wrong size");
    Program prog = bundle.chart().compile(sections[s]);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      auto v = section_values(prog, pts[k]);
      for (int r = 0; r < N; ++r) stacked(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k * N + r)) = v[static_cast<std::size_t>(r)];
    }
    if (!rep.basis_point.empty() && rep.kernel_basis.rows() == N) {
      auto v = section_values(prog, rep.basis_point);
      Eigen::Map<const Eigen::VectorXd> sv(v.data(), N);
      Eigen::VectorXd c = rep.kernel_basis.transpose() * sv;
      double dist = (sv - rep.kernel_basis * c).norm() / std::max(1.0, sv.norm());
      rep.known_residual = std::max(rep.known_residual, dist);
      rep.known_coefficients.emplace_back(c.data(), c.data() + c.size());
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < s.size(); ++k) {
    if (s(k) > 1e-8 * s(0)) ++rank;
  }
  rep.known_rank = rank;
  rep.exact = rank == rep.D && rep.known_residual < 1e-6;
}

MobilityReport parallel_oneform_dimension(const MetricField& g, const KernelOptions& opt) {
  return kernel_dimension(LinearConnectionBundle(g, FiberKind::oneform), opt);
}

MobilityReport parallel_vector_dimension(const MetricField& g, const KernelOptions& opt) {
  return kernel_dimension(LinearConnectionBundle(g, FiberKind::vector), opt);
}

MobilityReport parallel_tensor_dimension(const MetricField& g, const KernelOptions& opt, std::optional<int> expected_l) {
  MobilityReport rep = kernel_dimension(LinearConnectionBundle(g, FiberKind::sym2), opt);
  MobilityReport one = parallel_oneform_dimension(g, opt);
  rep.k = one.D;
  rep.l = rep.D - one.D * (one.D + 1) / 2;
  if (expected_l) rep.counting_consistent = *rep.l == *expected_l;
  return rep;
}

MobilityReport mobility_of_metric(const MetricField& g, const std::vector<SolutionTriple>& known,
                                  const KernelOptions& opt) {
  EinsteinReport er = is_einstein(g);
  LinearConnectionBundle bundle = build_prolongation(g, er.B);
  MobilityReport rep = kernel_dimension(bundle, opt);
  std::vector<std::vector<Expr>> sections;
  for (const auto& s : known) sections.push_back(prolongation_section(s));
  match_known(rep, bundle, sections);
  SignatureCounts sc = signature(g, g.chart().center());
  const int minor = std::min(sc.plus, sc.minus);
  if (minor == 0) rep.signature_class = SignatureClass::riemannian;
  if (minor == 1) rep.signature_class = SignatureClass::lorentzian;
  if (rep.signature_class && g.dimension() >= 3) {
    rep.in_admissible_list = mobility_values(g.dimension(), *rep.signature_class).contains(rep.D);
  }
  return rep;
}

}  // namespace einmob
