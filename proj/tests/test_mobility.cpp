#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "einmob/constructions.hpp"
#include "einmob/mobility.hpp"
#include "oracles/oracles.hpp"

using namespace einmob;

namespace {

std::vector<SolutionTriple> triples(const CatalogEntry& e) {
  std::vector<SolutionTriple> out;
  for (const auto& s : e.solutions) out.push_back(s.triple);
  return out;
}

double B_of(const CatalogEntry& e) {
  if (!e.solutions.empty()) return e.solutions.front().triple.B;
  const int n = e.metric.dimension();
  return -is_einstein(e.metric).scal / (n * (n - 1));
}

}  // namespace

TEST_CASE("pair_index packs the upper triangle") {
  CHECK(pair_index(3, 0, 0) == 0);
  CHECK(pair_index(3, 0, 2) == 2);
  CHECK(pair_index(3, 1, 1) == 3);
  CHECK(pair_index(3, 2, 1) == 4);
  CHECK(pair_index(3, 2, 2) == 5);
}

TEST_CASE("fiber dimensions") {
  MetricField g = flat_space(4).metric;
  CHECK(LinearConnectionBundle(g, FiberKind::prolongation).fiber_dimension() == 10 + 4 + 1);
  CHECK(LinearConnectionBundle(g, FiberKind::sym2).fiber_dimension() == 10);
  CHECK(LinearConnectionBundle(g, FiberKind::oneform).fiber_dimension() == 4);
  CHECK(LinearConnectionBundle(g, FiberKind::vector).fiber_dimension() == 4);
}

TEST_CASE("build_prolongation checks B and the Einstein condition") {
  CatalogEntry e = catalog_entry("example14");
  CHECK_NOTHROW((void)build_prolongation(e.metric, -1.0));
  CHECK_THROWS_AS((void)build_prolongation(e.metric, 0.0), BMismatchError);
  Chart r3("R3", {"x1", "x2", "x3"}, {{-1, 1}, {-1, 1}, {-1, 1}});
  MetricField bent = MetricField::diagonal(r3, {r3.parse("1 + x2^2/10"), Expr(1), Expr(1)});
  CHECK_THROWS_AS((void)build_prolongation(bent, 0.0), BMismatchError);
  KernelOptions bad;
  bad.max_order = 0;
  CHECK_THROWS_AS((void)kernel_dimension(build_prolongation(e.metric, -1.0), bad), std::invalid_argument);
}

TEST_CASE("known solutions are parallel sections and generic sections are not") {
  for (const char* name : {"flat3", "s3", "example14", "cone36", "warped"}) {
    CatalogEntry e = catalog_entry(name);
    CAPTURE(name);
    LinearConnectionBundle bundle = build_prolongation(e.metric, B_of(e));
    for (const auto& s : e.solutions) {
      CAPTURE(s.name);
      CHECK(section_residual(bundle, prolongation_section(s.triple)).max_abs < 1e-9);
    }
  }
  CatalogEntry e = catalog_entry("example14");
  LinearConnectionBundle bundle = build_prolongation(e.metric, -1.0);
  const Chart& c = e.metric.chart();
  std::vector<Expr> generic(static_cast<std::size_t>(bundle.fiber_dimension()), Expr(0));
  generic[0] = c.parse("x0 + t^2");
  generic[7] = c.parse("sin(x3)");
  generic.back() = Expr(1);
  CHECK(section_residual(bundle, generic).max_abs > 1e-3);
}

TEST_CASE("the connection matrices annihilate solutions at the level of values") {
  // ∂_i s + A_i s at a point, with ∂_i s from central differences
  CatalogEntry e = catalog_entry("example14");
  LinearConnectionBundle bundle = build_prolongation(e.metric, -1.0);
  const Chart& c = e.metric.chart();
  auto sec = prolongation_section(e.solutions[1].triple);
  Program prog = c.compile(sec);
  for (const auto& p : c.sample(4, 9)) {
    auto A = bundle.connection_values(p);
    auto s0 = prog.evaluate(p);
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(s0.data(), static_cast<Eigen::Index>(s0.size()));
    for (int i = 0; i < c.dimension(); ++i) {
      Eigen::VectorXd ds(s.size());
      for (Eigen::Index a = 0; a < s.size(); ++a) {
        ds(a) = oracle::fd([&](const std::vector<double>& q) { return prog.evaluate(q)[static_cast<std::size_t>(a)]; }, p, i);
      }
      CHECK((ds + A[static_cast<std::size_t>(i)] * s).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("flat prolongation bundles have full kernel") {
  for (int n = 2; n <= 4; ++n) {
    CAPTURE(n);
    LinearConnectionBundle bundle = build_prolongation(flat_space(n).metric, 0.0);
    MobilityReport k = kernel_dimension(bundle);
    CHECK(k.D == (n + 1) * (n + 2) / 2);
    CHECK(k.stabilized);
    MobilityReport t = loop_transport_dimension(bundle);
    CHECK(t.D == k.D);
  }
}

TEST_CASE("degree of mobility of the constant curvature and example metrics") {
  struct Case {
    const char* name;
    int D;
  };
  for (const Case& c : {Case{"flat3", 10}, Case{"s3", 10}, Case{"s4", 15}, Case{"example14", 4}, Case{"s2xs3", 1}}) {
    CAPTURE(c.name);
    CatalogEntry e = catalog_entry(c.name);
    MobilityReport r = mobility_of_metric(e.metric, triples(e));
    CHECK(r.D == c.D);
    CHECK(r.stabilized);
    CHECK(r.known_rank <= r.D);
    CHECK(r.exact);
    CHECK(r.known_residual < 1e-6);
    if (c.D >= 2) {
      REQUIRE(r.in_admissible_list.has_value());
      CHECK(*r.in_admissible_list);
    }
    MobilityReport t = loop_transport_dimension(build_prolongation(e.metric, B_of(e)));
    CHECK(t.D == r.D);
  }
}

TEST_CASE("example14: four independent solutions, D = 4 in the Lorentzian n = 5 list") {
  CatalogEntry e = catalog_entry("example14");
  MobilityReport r = mobility_of_metric(e.metric, triples(e));
  CHECK(r.known_count == 4);
  CHECK(r.known_rank == 4);
  CHECK(r.D == 4);
  REQUIRE(r.signature_class.has_value());
  CHECK(*r.signature_class == SignatureClass::lorentzian);
  CHECK(oracle::mobility_list(5, true).count(4) == 1);
  CHECK(oracle::mobility_list(5, false).count(4) == 0);
  REQUIRE(r.known_coefficients.size() == 4);
  CHECK(r.spectral_gap > 1e3);
}

TEST_CASE("monotonicity in sample count and order") {
  CatalogEntry e = catalog_entry("example14");
  LinearConnectionBundle bundle = build_prolongation(e.metric, -1.0);
  int prev = bundle.fiber_dimension() + 1;
  for (std::size_t s : {1u, 2u, 4u}) {
    KernelOptions o;
    o.samples = s;
    MobilityReport r = kernel_dimension(bundle, o);
    CHECK(r.D <= prev);
    prev = r.D;
  }
  MobilityReport r = kernel_dimension(bundle);
  for (std::size_t i = 1; i < r.rank_sequence.size(); ++i) CHECK(r.rank_sequence[i] >= r.rank_sequence[i - 1]);
  KernelOptions low;
  low.max_order = 1;
  CHECK(kernel_dimension(bundle, low).D >= r.D);
}

TEST_CASE("parallel symmetric tensors on cones") {
  for (const char* name : {"cone36", "cone5", "cone_s2xs3", "r2_x_cone_s2xs3", "cone_s2", "cone_s3", "case1_n5_k1_l1"}) {
    CAPTURE(name);
    CatalogEntry e = catalog_entry(name);
    REQUIRE(e.par02.has_value());
    MobilityReport r = parallel_tensor_dimension(e.metric, {}, e.l);
    CHECK(r.D == *e.par02);
    REQUIRE(r.k.has_value());
    if (e.k) CHECK(*r.k == *e.k);
    if (e.l) {
      REQUIRE(r.counting_consistent.has_value());
      CHECK(*r.counting_consistent);
    }
    MobilityReport t = loop_transport_dimension(LinearConnectionBundle(e.metric, FiberKind::sym2));
    CHECK(t.D == r.D);
  }
}

TEST_CASE("the metric counterexample cone: k = 2, l = 1, dim Par = 4") {
  CatalogEntry e = catalog_entry("cone36");
  MobilityReport r = parallel_tensor_dimension(e.metric, {}, 1);
  CHECK(r.D == 4);
  CHECK(r.k == 2);
  CHECK(r.l == 1);
  CHECK(parallel_oneform_dimension(e.metric).D == 2);
  CHECK(parallel_vector_dimension(e.metric).D == 2);
}

TEST_CASE("cone count: D(base) equals dim Par^{0,2} of the cone") {
  struct Pair {
    const char* base;
    const char* cone;
  };
  for (const Pair& p : {Pair{"s2", "cone_s2"}, Pair{"s3", "cone_s3"}, Pair{"s2xs3", "cone_s2xs3"}}) {
    CAPTURE(p.cone);
    CatalogEntry b = catalog_entry(p.base);
    CatalogEntry c = catalog_entry(p.cone);
    const int D = mobility_of_metric(b.metric, triples(b)).D;
    CHECK(D == parallel_tensor_dimension(c.metric).D);
  }
}

TEST_CASE("S^2 symmetric tensor bundle: both oracles agree") {
  CatalogEntry e = catalog_entry("s2");
  LinearConnectionBundle bundle(e.metric, FiberKind::sym2);
  MobilityReport k = kernel_dimension(bundle);
  MobilityReport t = loop_transport_dimension(bundle);
  CHECK(k.D == 1);
  CHECK(t.D == 1);
}

TEST_CASE("flat parallel counts") {
  for (int n = 2; n <= 5; ++n) {
    CAPTURE(n);
    MetricField g = flat_space(n).metric;
    MobilityReport r = parallel_tensor_dimension(g, {}, 0);
    CHECK(r.D == n * (n + 1) / 2);
    CHECK(r.k == n);
    CHECK(r.counting_consistent == true);
  }
}

TEST_CASE("dimension bounds for nonflat Ricci-flat cones") {
  for (const char* name : {"cone36", "cone5", "cone_s2xs3", "r2_x_cone_s2xs3", "null_cone_flat3"}) {
    CAPTURE(name);
    CatalogEntry e = catalog_entry(name);
    const int n = e.metric.dimension();
    const bool flat = is_constant_curvature(e.metric).constant && std::fabs(is_constant_curvature(e.metric).c) < 1e-9;
    if (flat) continue;
    CHECK(n >= 5);
    bool null_parallel = false;
    for (const auto& f : e.parallel_fields) {
      double worst = 0;
      for (const auto& p : e.metric.chart().sample(4, 1)) {
        auto v = f.field.values(p);
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
        worst = std::max(worst, std::fabs(x.dot(e.metric.value(p) * x)));
      }
      if (worst < 1e-9) null_parallel = true;
    }
    if (null_parallel) CHECK(n >= 6);
  }
}
