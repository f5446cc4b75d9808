#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "einmob/constructions.hpp"
#include "einmob/curvature.hpp"
#include "einmob/projective.hpp"
#include "einmob/tensor_calculus.hpp"
#include "oracles/oracles.hpp"

using namespace einmob;

namespace {

oracle::MetricFn numeric(const MetricField& g) {
  return [g](const oracle::Vec& p) { return g.value(p); };
}

std::vector<Expr> difference(const TensorField& a, const TensorField& b) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < a.components().size(); ++i) out.push_back(a.component(i) - b.component(i));
  return out;
}

MetricField flat(int n) { return flat_space(n).metric; }

}  // namespace

TEST_CASE("flat space has vanishing connection and curvature") {
  MetricField g = flat(3);
  CurvatureSet c = curvature(g);
  for (const auto& e : c.gamma) CHECK(e.is_zero());
  for (const auto& e : c.riemann) CHECK(e.is_zero());
  CHECK(c.scal.is_zero());
  EinsteinReport er = is_einstein(g);
  CHECK(er.einstein);
  CHECK(er.B == doctest::Approx(0.0));
  ConstantCurvatureReport cc = is_constant_curvature(g);
  CHECK(cc.constant);
  CHECK(cc.c == doctest::Approx(0.0));
  CHECK(signature(flat(4), flat(4).chart().center()) == SignatureCounts{4, 0});
}

TEST_CASE("cone Christoffel symbols") {
  CatalogEntry base = catalog_entry("s2");
  Construction c = cone(base.metric);
  CurvatureSet cs = christoffels(c.metric);
  const Chart& ch = c.metric.chart();
  Expr r = ch.coordinate(0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      CHECK(is_zero(cs.christoffel(0, a + 1, b + 1) + r * base.metric(a, b), ch).is_zero());
      Expr expect = a == b ? Expr(1) / r : Expr(0);
      CHECK(is_zero(cs.christoffel(a + 1, 0, b + 1) - expect, ch).is_zero());
    }
  }
}

TEST_CASE("example14: Christoffel symbol of the x2 block") {
  CatalogEntry e = catalog_entry("example14");
  const Chart& ch = e.metric.chart();
  CurvatureSet cs = christoffels(e.metric);
  const int t = 0;
  const int x2 = 3;
  CHECK(is_zero(cs.christoffel(t, x2, x2) + ch.parse("exp(2*t)"), ch).is_zero());
  for (const auto& p : ch.sample(5, 2)) {
    auto G = oracle::christoffel(numeric(e.metric), p);
    CHECK(G[t][x2][x2] == doctest::Approx(-std::exp(2 * p[0])).epsilon(1e-6));
  }
}

TEST_CASE("Christoffel symbols match finite differences on every catalog metric") {
  for (const auto& name : catalog_names()) {
    CatalogEntry e = catalog_entry(name);
    CAPTURE(name);
    const int n = e.metric.dimension();
    for (const auto& p : e.metric.chart().sample(10, 1)) {
      PointCurvature pc = point_curvature(e.metric, p);
      auto G = oracle::christoffel(numeric(e.metric), p);
      double worst = 0;
      double scale = 1;
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const double ref = G[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            worst = std::max(worst, std::fabs(pc.christoffel(k, i, j) - ref));
            scale = std::max(scale, std::fabs(ref));
          }
        }
      }
      CHECK(worst < 1e-6 * scale);
    }
  }
}

TEST_CASE("Ricci tensor matches nested finite differences") {
  for (const char* name : {"example14", "s2", "s2xs3", "cone36", "warped"}) {
    CatalogEntry e = catalog_entry(name);
    CAPTURE(name);
    for (const auto& p : e.metric.chart().sample(3, 4)) {
      PointCurvature pc = point_curvature(e.metric, p);
      Eigen::MatrixXd ref = oracle::ricci(numeric(e.metric), p);
      CHECK((pc.ricci - ref).cwiseAbs().maxCoeff() < 1e-5 * (1 + ref.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("scalar curvature: unit S^2 and example14") {
  CatalogEntry s2 = catalog_entry("s2");
  CurvatureSet c = curvature(s2.metric);
  CHECK(is_zero(c.scal - Expr(2), s2.metric.chart()).is_zero());
  const auto p = s2.metric.chart().center();
  Eigen::MatrixXd ric = oracle::ricci(numeric(s2.metric), p);
  Eigen::MatrixXd ginv = s2.metric.value(p).inverse();
  CHECK((ginv.cwiseProduct(ric)).sum() == doctest::Approx(2.0).epsilon(1e-5));

  CatalogEntry e = catalog_entry("example14");
  CheckOptions opt;
  opt.trials = 10;
  EinsteinReport er = is_einstein(e.metric, opt);
  CHECK(er.einstein);
  CHECK(er.scal == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(er.scal_spread < 1e-6);
  CHECK(er.B == doctest::Approx(-1.0));
}

TEST_CASE("signature counts") {
  CatalogEntry e = catalog_entry("example14");
  CHECK(signature(e.metric, {0, 0, 0, 0, M_PI / 2}) == SignatureCounts{1, 4});
  CatalogEntry c = catalog_entry("cone36");
  SignatureCounts s = signature(c.metric, {1, 0, 0, 0, 0, M_PI / 2});
  CHECK(std::min(s.plus, s.minus) == 2);
  CHECK(std::max(s.plus, s.minus) == 4);

  Chart ch("degenerate", {"x", "y"}, {{-1, 1}, {-1, 1}});
  MetricField g(ch, {Expr(1), Expr(0), Expr(0), ch.parse("x^2 + 1")});
  CHECK(signature(g, ch.center()) == SignatureCounts{2, 0});
  Chart wide("sign_change", {"x", "y"}, {{0.5, 1}, {-1, 1}});
  MetricField h(wide, {Expr(1), Expr(0), Expr(0), wide.parse("y")});
  CHECK_THROWS_AS((void)signature(h), std::runtime_error);
  CHECK_THROWS_AS(MetricField(ch, {Expr(1), Expr(1), Expr(1), Expr(1)}), DegenerateMetricError);
}

TEST_CASE("signature is constant over every catalog sample box") {
  for (const auto& name : catalog_names()) {
    CatalogEntry e = catalog_entry(name);
    CAPTURE(name);
    CHECK_NOTHROW((void)signature(e.metric, 20, 0));
  }
}

TEST_CASE("a perturbed flat metric is not Einstein") {
  Chart ch("R3", {"x1", "x2", "x3"}, {{-1, 1}, {-1, 1}, {-1, 1}});
  MetricField g = MetricField::diagonal(ch, {ch.parse("1 + 1/10*x2^2"), Expr(1), Expr(1)});
  EinsteinReport er = is_einstein(g);
  CHECK_FALSE(er.einstein);
  CHECK(er.max_residual > 1e-3);
  CHECK(er.witness.size() == 3);
  CHECK_FALSE(er.witness_component.empty());
}

TEST_CASE("constant curvature") {
  ConstantCurvatureReport s3 = is_constant_curvature(catalog_entry("s3").metric);
  CHECK(s3.constant);
  CHECK(s3.c == doctest::Approx(1.0));
  CHECK_FALSE(is_constant_curvature(catalog_entry("example14").metric).constant);
  CHECK_FALSE(is_constant_curvature(catalog_entry("s2xs3").metric).constant);
}

TEST_CASE("metricity, Ricci symmetry and Bianchi on every catalog metric") {
  for (const auto& name : catalog_names()) {
    CatalogEntry e = catalog_entry(name);
    CAPTURE(name);
    ResidualReport m = parallel_residual(e.metric.as_tensor(), e.metric);
    CHECK(m.within(1e-9));
    IdentityReport id = curvature_identities(e.metric);
    CHECK(id.bianchi <= 1e-9 * (1 + id.scale));
    CHECK(id.ricci_asymmetry <= 1e-9 * (1 + id.scale));
  }
}

TEST_CASE("symbolic inverse") {
  for (const char* name : {"example14", "cone36", "warped", "s4"}) {
    CatalogEntry e = catalog_entry(name);
    CAPTURE(name);
    const MetricField& g = e.metric;
    REQUIRE(g.has_symbolic_inverse());
    const int n = g.dimension();
    for (const auto& p : g.chart().sample(5, 3)) {
      Eigen::MatrixXd inv(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) inv(i, j) = g.chart().evaluate(g.inverse(i, j), p);
      }
      CHECK((inv * g.value(p) - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Lie derivative of the metric") {
  MetricField g = flat(2);
  const Chart& ch = g.chart();
  TensorField dx = TensorField::vector(ch, {Expr(1), Expr(0)});
  TensorField killing = lie_derivative_metric(dx, g);
  for (const auto& e : killing.components()) CHECK(e.is_zero());
  TensorField hom = TensorField::vector(ch, {ch.coordinate(0), ch.coordinate(1)});
  TensorField twice = Expr(2) * g.as_tensor();
  for (const auto& e : difference(lie_derivative_metric(hom, g), twice)) CHECK(e.is_zero());

  // L_{Λ♯} g = 2∇Λ = 2μ g + 2B L₁ for L₁ of example14
  CatalogEntry ex = catalog_entry("example14");
  const SolutionTriple& s = ex.solutions[1].triple;
  REQUIRE(ex.solutions[1].name == "L1");
  TensorField v = raise_index(s.Lambda, ex.metric);
  TensorField lhs = lie_derivative_metric(v, ex.metric);
  TensorField rhs = Expr(2) * s.mu * ex.metric.as_tensor() + Expr(Rational(rationalize(2 * s.B))) * s.L;
  CHECK(zero_residual(difference(lhs, rhs), ex.metric.chart()).within(1e-9));
  TensorField nabla = covariant_derivative(s.Lambda, ex.metric);
  CHECK(zero_residual(difference(lhs, Expr(2) * nabla), ex.metric.chart()).within(1e-9));
  const auto p = ex.metric.chart().center();
  auto numeric_lie = lie_derivative_metric_values(v, ex.metric, p);
  auto symbolic_lie = lhs.values(p);
  for (std::size_t i = 0; i < numeric_lie.size(); ++i) CHECK(numeric_lie[i] == doctest::Approx(symbolic_lie[i]));
}

TEST_CASE("musical isomorphisms") {
  MetricField g = flat(2);
  const Chart& ch = g.chart();
  TensorField dx = TensorField::one_form(ch, {Expr(1), Expr(0)});
  TensorField sharp = raise_index(dx, g);
  CHECK(sharp.up() == 1);
  CHECK(sharp[{0}] == Expr(1));
  CHECK(sharp[{1}].is_zero());

  CatalogEntry ex = catalog_entry("example14");
  const SolutionTriple& s = ex.solutions[1].triple;
  TensorField v = raise_index(s.Lambda, ex.metric);
  Expr a = inner(v, v, ex.metric);
  std::vector<Expr> terms;
  for (int i = 0; i < 5; ++i) terms.push_back(s.Lambda[{i}] * v[{i}]);
  Expr b = sum(terms);
  for (const auto& p : ex.metric.chart().sample(5, 9)) {
    CHECK(ex.metric.chart().evaluate(a, p) == doctest::Approx(ex.metric.chart().evaluate(b, p)).epsilon(1e-10));
  }

  TensorField w = TensorField::vector(ex.metric.chart(), {ex.metric.chart().parse("x1*t + 1"), Expr(2),
                                                         ex.metric.chart().parse("sin(x0)"), Expr(0),
                                                         ex.metric.chart().parse("x3^2")});
  TensorField back = raise_index(lower_index(w, ex.metric), ex.metric);
  CHECK(zero_residual(difference(back, w), ex.metric.chart()).max_abs < 1e-12);
}

TEST_CASE("covariant derivative: numeric values agree with the symbolic tensor") {
  CatalogEntry ex = catalog_entry("example14");
  const SolutionTriple& s = ex.solutions[2].triple;
  TensorField dL = covariant_derivative(s.L, ex.metric);
  CHECK(dL.down() == 3);
  for (const auto& p : ex.metric.chart().sample(3, 1)) {
    auto a = dL.values(p);
    auto b = covariant_derivative_values(s.L, ex.metric, p);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }
}

TEST_CASE("parallel vector fields of the cone36 metric against finite differences") {
  CatalogEntry c = catalog_entry("cone36");
  for (const auto& f : c.parallel_fields) {
    CAPTURE(f.name);
    for (const auto& p : c.metric.chart().sample(3, 2)) {
      const double defect = oracle::parallel_vector_defect(
          numeric(c.metric), [&](const oracle::Vec& q) { return f.field.values(q); }, p);
      CHECK(defect < 1e-6);
    }
  }
}
