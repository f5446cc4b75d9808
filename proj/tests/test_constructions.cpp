#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "einmob/constructions.hpp"
#include "einmob/curvature.hpp"
#include "einmob/mobility.hpp"
#include "oracles/oracles.hpp"

using namespace einmob;

namespace {

oracle::MetricFn numeric(const MetricField& g) {
  return [g](const oracle::Vec& p) { return g.value(p); };
}

std::function<Eigen::MatrixXd(const oracle::Vec&)> numeric(const TensorField& t, int n) {
  return [t, n](const oracle::Vec& p) {
    auto v = t.values(p);
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), n, n).eval();
  };
}

double max_ricci(const MetricField& g, std::size_t points = 3) {
  double m = 0;
  for (const auto& p : g.chart().sample(points, 17)) m = std::max(m, oracle::ricci(numeric(g), p).cwiseAbs().maxCoeff());
  return m;
}

double max_riemann(const MetricField& g, std::size_t points = 3) {
  double m = 0;
  for (const auto& p : g.chart().sample(points, 17)) m = std::max(m, oracle::riemann_max(numeric(g), p));
  return m;
}

// Finite-difference Ricci is accurate to about 1e-4 of the curvature scale.
bool ricci_flat(const MetricField& g, std::size_t points = 3) {
  return max_ricci(g, points) < 1e-4 * (1 + max_riemann(g, points));
}

MetricField round_sphere2(double radius2) {
  Chart c("sphere2", {"th", "ph"}, {{0.5, 2.5}, {-1.0, 1.0}});
  Expr R(rationalize(radius2));
  return MetricField::diagonal(c, {R, R * sin(c.coordinate(0)) * sin(c.coordinate(0))});
}

Eigen::VectorXd vec(const TensorField& t, const Point& p) {
  auto v = t.values(p);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("cones over unit spheres are flat and carry xi = r d/dr") {
  for (const char* name : {"s2", "s3"}) {
    CAPTURE(name);
    Construction c = cone(catalog_entry(name).metric, 1);
    REQUIRE(c.xi.has_value());
    REQUIRE(c.xi_residual.has_value());
    CHECK(c.xi_residual->max_abs < 1e-9);
    CHECK(c.metric.chart().coordinates().front() == "r");
    CHECK(max_riemann(c.metric) < 1e-4);
    ConstantCurvatureReport cc = is_constant_curvature(c.metric);
    CHECK(cc.constant);
    CHECK(std::fabs(cc.c) < 1e-9);
    // ξ = r∂_r
    for (const auto& p : c.metric.chart().sample(3, 2)) {
      Eigen::VectorXd x = vec(*c.xi, p);
      CHECK(x(0) == doctest::Approx(p[0]));
      CHECK(x.tail(x.size() - 1).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("cone equivalences on spheres of other radius") {
  // curvature 1/2 base: not constant curvature 1 and Scal != n(n-1)
  MetricField base = round_sphere2(2.0);
  Construction c = cone(base, 1);
  CHECK(c.xi_residual->max_abs < 1e-9);
  CHECK(max_riemann(c.metric) > 1e-2);
  CHECK(max_ricci(c.metric) > 1e-2);
  CHECK_FALSE(is_constant_curvature(c.metric).constant);
  // the unit sphere passes both
  Construction unit = cone(round_sphere2(1.0), 1);
  CHECK(max_riemann(unit.metric) < 1e-4);
  CHECK(is_einstein(round_sphere2(1.0)).scal == doctest::Approx(2.0));
}

TEST_CASE("cone over S^2(1/2) x S^3(1/sqrt 2) is Ricci flat and not flat") {
  CatalogEntry base = catalog_entry("s2xs3");
  CHECK(is_einstein(base.metric).scal == doctest::Approx(20.0));
  Construction c = cone(base.metric, 1);
  CHECK(ricci_flat(c.metric));
  CHECK(max_riemann(c.metric) > 0.1);
  CHECK(c.xi_residual->max_abs < 1e-9);
}

TEST_CASE("cone36: signature, Ricci flat, nonflat, isotropic parallel fields") {
  CatalogEntry e = catalog_entry("cone36");
  CHECK(e.metric.dimension() == 6);
  SignatureCounts s = signature(e.metric, 10, 3);
  CHECK(std::min(s.plus, s.minus) == 2);
  CHECK(std::max(s.plus, s.minus) == 4);
  CHECK(ricci_flat(e.metric));
  CHECK(max_riemann(e.metric) > 0.1);
  REQUIRE(e.parallel_fields.size() == 2);
  for (const auto& p : e.metric.chart().sample(5, 4)) {
    Eigen::MatrixXd G = e.metric.value(p);
    Eigen::VectorXd v1 = vec(e.parallel_fields[0].field, p);
    Eigen::VectorXd v2 = vec(e.parallel_fields[1].field, p);
    CHECK(std::fabs(v1.dot(G * v1)) < 1e-12);
    CHECK(std::fabs(v1.dot(G * v2)) < 1e-12);
    CHECK(std::fabs(v2.dot(G * v2)) < 1e-12);
    Eigen::MatrixXd both(6, 2);
    both << v1, v2;
    CHECK(oracle::rank(both) == 2);
  }
}

TEST_CASE("sign flip and renaming") {
  MetricField g = catalog_entry("example14").metric;
  MetricField f = sign_flip(g);
  const Point p = g.chart().center();
  CHECK((f.value(p) + g.value(p)).cwiseAbs().maxCoeff() == 0.0);
  SignatureCounts a = signature(g, p);
  SignatureCounts b = signature(f, p);
  CHECK(a.plus == b.minus);
  CHECK(a.minus == b.plus);

  MetricField r = rename_coordinates(g, "_b");
  CHECK(r.chart().coordinates()[1] == "x0_b");
  CHECK((r.value(p) - g.value(p)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flat space and products") {
  Construction f = flat_space(3);
  CHECK(f.metric.chart().coordinates() == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(flat_space(1, "y").metric.chart().coordinates() == std::vector<std::string>{"y"});
  Construction g = flat_space(2, "y");
  Construction fg = product(f, g);
  CHECK(fg.metric.dimension() == 5);
  REQUIRE(fg.xi.has_value());
  CHECK(fg.xi_residual->max_abs < 1e-12);
  CHECK(max_riemann(fg.metric) < 1e-6);
  CHECK_THROWS_AS((void)product(f, flat_space(2)), ConstructionError);
  CHECK_THROWS_AS((void)cone(flat_space(1, "r").metric, 1), ConstructionError);
  CHECK_THROWS_AS((void)cone(f.metric, 2), std::invalid_argument);
}

TEST_CASE("product of two cones: xi = xi1 + xi2") {
  Construction a = cone(catalog_entry("s2").metric, 1);
  Construction b = cone(rename_coordinates(catalog_entry("s2xs3").metric, "_b"), 1, ConeOptions{"rb", {0.5, 2.0}});
  Construction ab = product(a, b);
  REQUIRE(ab.xi.has_value());
  CHECK(ab.xi_residual->max_abs < 1e-9);
  for (const auto& p : ab.metric.chart().sample(3, 6)) {
    Eigen::VectorXd x = vec(*ab.xi, p);
    CHECK(x(0) == doctest::Approx(p[0]));
    CHECK(x(3) == doctest::Approx(p[3]));
    CHECK(std::fabs(x(1)) + std::fabs(x(2)) + x.tail(5).cwiseAbs().sum() < 1e-15);
  }
  CHECK(ricci_flat(ab.metric, 2));
}

TEST_CASE("realizations: dim Par^{0,2} = k(k+1)/2 + l") {
  for (const char* name : {"case1_n5_k1_l1", "case1_n9_k0_l2", "case2_n5", "r2_x_cone_s2xs3"}) {
    CAPTURE(name);
    CatalogEntry e = catalog_entry(name);
    REQUIRE(e.k.has_value());
    REQUIRE(e.l.has_value());
    REQUIRE(e.par02.has_value());
    CHECK(*e.par02 == *e.k * (*e.k + 1) / 2 + *e.l);
    CHECK(parallel_tensor_dimension(e.metric, {}, e.l).D == *e.par02);
  }
  CatalogEntry c2 = catalog_entry("case2_n5");
  SignatureCounts s = signature(c2.metric, 10, 1);
  CHECK(std::min(s.plus, s.minus) == 2);
  CHECK(s.plus + s.minus == 6);
  REQUIRE(c2.realizes_n.has_value());
  CHECK(oracle::mobility_list(*c2.realizes_n, true).count(*c2.par02) == 1);
}

TEST_CASE("warped metric: solution, connection and curvature identities") {
  WarpedSpec spec = catalog_warped_spec();
  WarpedResult w = warped(spec);
  CHECK(w.metric.dimension() == 6);
  CHECK(w.extsys.pass);
  CHECK(w.levi_civita.max_abs < 1e-9);
  CHECK(w.curvature.max_abs < 1e-9);
  CHECK(w.ricci.max_abs < 1e-9);
  CHECK(w.offsets == std::vector<int>{0, 2, 4});
  CHECK(ricci_flat(w.metric));
  for (const auto& p : w.metric.chart().sample(4, 8)) CHECK(w.metric.chart().evaluate(w.solution.mu, p) == 0.0);

  // L♯ has eigenvalue ρ_i on the blocks and a Jordan block on N₀
  const Point p = w.metric.chart().center();
  auto lv = w.solution.L.values(p);
  Eigen::MatrixXd L = Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>>(lv.data());
  Eigen::MatrixXd Lsharp = w.metric.value(p).inverse() * L;
  for (int i = 2; i < 4; ++i) CHECK(Lsharp(i, i) == doctest::Approx(spec.rho[0]));
  for (int i = 4; i < 6; ++i) CHECK(Lsharp(i, i) == doctest::Approx(spec.rho[1]));
  Eigen::Matrix2d J = Lsharp.topLeftCorner(2, 2);
  const double ev = w.metric.chart().evaluate(spec.lambda, p) + spec.C;
  Eigen::Matrix2d N = J - ev * Eigen::Matrix2d::Identity();
  CHECK((N * N).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(N.cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("warped rejects vanishing warping factors and bad blocks") {
  WarpedSpec spec = catalog_warped_spec();
  spec.rho = {3.0, 2.0};  // λ + C = x crosses 3 in the box
  CHECK_THROWS_AS((void)warped(spec), ConstructionError);
  WarpedSpec same = catalog_warped_spec();
  same.rho = {1.0, 1.0};
  CHECK_THROWS_AS((void)warped(same), ConstructionError);
  WarpedSpec one = catalog_warped_spec();
  one.blocks.pop_back();
  one.rho.pop_back();
  CHECK_THROWS_AS((void)warped(one), ConstructionError);
  WarpedSpec timelike = catalog_warped_spec();
  timelike.lambda = timelike.h0.chart().parse("x + y");
  CHECK_THROWS_AS((void)warped(timelike), ConstructionError);
}

TEST_CASE("parallel fields from the last flat block") {
  WarpedSpec spec = catalog_warped_spec();
  WarpedResult w = warped(spec);
  ParallelFieldReport a = warped_parallel_field(spec, w, Expr::coordinate("w1"));
  ParallelFieldReport b = warped_parallel_field(spec, w, Expr::coordinate("w2"));
  for (const auto* r : {&a, &b}) {
    CHECK(r->parallel.max_abs < 1e-9);
    CHECK(r->direc1.max_abs < 1e-9);
    CHECK(r->direc3.max_abs < 1e-9);
    CHECK(r->independent);
  }
  const int n = w.metric.dimension();
  TensorField Lam = TensorField::vector(w.metric.chart(), {Expr(0), Expr(1), Expr(0), Expr(0), Expr(0), Expr(0)});
  for (const auto& p : w.metric.chart().sample(4, 12)) {
    for (const auto* r : {&a, &b}) {
      CHECK(oracle::parallel_vector_defect(numeric(w.metric), [&](const oracle::Vec& q) { return r->W.values(q); }, p) <
            1e-7);
    }
    // Λ♯ = h⁻¹dλ is ∂_y for h₀ = dx⊙dy and λ = x
    Eigen::VectorXd grad = w.metric.value(p).inverse().col(0);
    CHECK((grad - vec(Lam, p)).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::MatrixXd M(n, 3);
    M << vec(a.W, p), vec(b.W, p), vec(Lam, p);
    CHECK(oracle::rank(M) == 3);
  }
  CHECK_THROWS_AS((void)warped_parallel_field(spec, w, Expr(0)), ConstructionError);
  CHECK_THROWS_AS((void)warped_parallel_field(spec, w, Expr::coordinate("w1") * Expr(2)), ConstructionError);
}

TEST_CASE("null cone family over flat space") {
  Chart hc("h", {"y1", "y2", "y3"}, std::vector<Interval>(3, Interval{-1.0, 1.0}));
  MetricField h = MetricField::diagonal(hc, {Expr(1), Expr(1), Expr(1)});

  NullConeFamily q = null_cone_family(h, hc.parse("(y1^2 + y2^2 + y3^2)/2"), 1.0);
  CHECK(q.hessian.max_abs < 1e-12);
  CHECK(q.v_parallel.max_abs < 1e-9);
  CHECK(q.V_parallel.max_abs < 1e-9);
  CHECK(q.g_v_V == doctest::Approx(-1.0));
  // ĝ(V,V) = −2CF + |grad F|² vanishes at y = 0
  CHECK(std::fabs(q.g_V_V) < 1e-12);
  CHECK(ricci_flat(q.cone.metric));

  NullConeFamily lin = null_cone_family(h, hc.parse("y1"), 0.0);
  CHECK(lin.V_parallel.max_abs < 1e-9);
  CHECK(std::fabs(lin.g_v_V) < 1e-12);
  CHECK(lin.g_V_V == doctest::Approx(1.0));
  for (const auto& p : lin.cone.metric.chart().sample(3, 3)) {
    for (const TensorField* f : {&lin.v, &lin.V}) {
      CHECK(oracle::parallel_vector_defect(numeric(lin.cone.metric), [&](const oracle::Vec& x) { return f->values(x); },
                                           p) < 1e-7);
    }
  }
  CHECK_THROWS_AS((void)null_cone_family(h, hc.parse("y1^3"), 0.0), ConstructionError);
}

TEST_CASE("null cone family over a curved base is not Ricci flat") {
  MetricField h = round_sphere2(1.0);
  NullConeFamily c = null_cone_family(h, Expr(1), 0.0);
  CHECK(max_ricci(c.cone.metric) > 1e-2);
}

TEST_CASE("lifting solutions to the cone") {
  for (const char* name : {"s3", "s2xs3"}) {
    CAPTURE(name);
    CatalogEntry e = catalog_entry(name);
    Construction c = cone(e.metric, 1);
    const int n = c.metric.dimension();
    for (const auto& s : e.solutions) {
      CAPTURE(s.name);
      TensorField A = cone_lift(c, s.triple);
      TensorField wrong = cone_lift(c, s.triple, 1);
      double good = 0;
      double bad = 0;
      for (const auto& p : c.metric.chart().sample(3, 5)) {
        good = std::max(good, oracle::parallel_sym2_defect(numeric(c.metric), numeric(A, n), p));
        bad = std::max(bad, oracle::parallel_sym2_defect(numeric(c.metric), numeric(wrong, n), p));
      }
      CHECK(good < 1e-6);
      const bool nonaffine = verify_main(e.metric, s.triple.L).affine == false;
      if (nonaffine) CHECK(bad > 1e-2);
    }
  }
}

TEST_CASE("catalog loads and every entry is verified") {
  auto names = catalog_names();
  CHECK(names.size() >= 20);
  for (const auto& e : catalog()) {
    CAPTURE(e.name);
    CHECK(!e.description.empty());
    if (e.xi) CHECK(cone_field_residual(*e.xi, e.metric).max_abs < 1e-9);
    if (e.scal) CHECK(is_einstein(e.metric).scal == doctest::Approx(*e.scal).epsilon(1e-9));
  }
  try {
    (void)catalog_entry("nope");
    FAIL("expected an unknown entry error");
  } catch (const std::invalid_argument& ex) {
    CHECK(std::string(ex.what()).find("example14") != std::string::npos);
  }
}
