#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "einmob/calculus.hpp"
#include "einmob/chart.hpp"
#include "einmob/constructions.hpp"
#include "einmob/parse.hpp"
#include "einmob/program.hpp"
#include "einmob/rational.hpp"
#include "oracles/oracles.hpp"

using namespace einmob;

namespace {

const std::vector<std::string> coords{"t", "x0", "x1", "x2", "x3", "r", "x", "y"};

const std::vector<std::string> corpus{
    "exp(2*t)*sin(x3)",
    "exp(2*t)*exp(x2)*sin(x3)",
    "r^2*(1 - -1)",
    "(x+1)*(x-1)",
    "x/(1 + y^2)",
    "sqrt(2 + x^2)*cosh(y)",
    "sinh(x*y) - 3/4*x^3",
    "abs(x - 3)*cos(r)",
    "(x + y)^3",
    "1/(x*y + 2)^2",
    "exp(t)*exp(-t)",
    "-x^2 + 1e-5*y",
    "sin(x)^2 + cos(x)^2",
    "(2*x + 5)^(1/2)",
    "x^(-3/2)*r",
};

std::map<std::string, double> env_at(const std::vector<double>& x) {
  std::map<std::string, double> env;
  for (std::size_t i = 0; i < coords.size(); ++i) env[coords[i]] = x[i];
  return env;
}

std::vector<double> random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 1.4);
  std::vector<double> x(coords.size());
  for (auto& v : x) v = u(rng);
  return x;
}

bool close(double a, double b, double rel) { return std::fabs(a - b) <= rel * (1 + std::max(std::fabs(a), std::fabs(b))); }

}  // namespace

TEST_CASE("rational arithmetic and rationalize") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-3, 6).is_negative());
  CHECK((Rational(3, 4) * Rational(4, 3)).is_one());
  CHECK(rationalize(0.25) == Rational(1, 4));
  CHECK(rationalize(1.0 / 3.0) == Rational(1, 3));
  CHECK(rationalize(-2.0) == Rational(-2));
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("parse examples") {
  Expr e = parse("exp(2*t)*sin(x3)", coords);
  CHECK(e == exp(Expr(2) * Expr::coordinate("t")) * sin(Expr::coordinate("x3")));
  CHECK(parse("0", coords).is_zero());
  Expr r = Expr::coordinate("r");
  CHECK(parse("r^2*(1 - -1)", coords) == Expr(2) * r * r);
  // both sides evaluated by the tree oracle at r = 1.7
  std::map<std::string, double> env{{"r", 1.7}};
  CHECK(oracle::tree_eval(parse_raw("r^2*(1 - -1)", coords), env) == doctest::Approx(5.78).epsilon(1e-12));
  CHECK(oracle::tree_eval(parse("r^2*(1 - -1)", coords), env) == doctest::Approx(5.78).epsilon(1e-12));
}

TEST_CASE("parse precedence") {
  std::map<std::string, double> env{{"x", 2.0}, {"y", 3.0}};
  CHECK(oracle::tree_eval(parse("-x^2", coords), env) == doctest::Approx(-4));
  CHECK(oracle::tree_eval(parse("x^2^3", coords), env) == doctest::Approx(256.0));
  CHECK(oracle::tree_eval(parse("x/y/2", coords), env) == doctest::Approx(2.0 / 3.0 / 2.0));
  CHECK(oracle::tree_eval(parse("x - y - 1", coords), env) == doctest::Approx(-2));
}

TEST_CASE("parse errors") {
  try {
    (void)parse("x + * 2", coords);
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    (void)parse("x + q", coords);
    FAIL("expected an unknown identifier error");
  } catch (const UnknownIdentifierError& e) {
    CHECK(e.identifier() == "q");
    CHECK(e.admissible().size() == coords.size());
  }
  CHECK_THROWS_AS((void)parse("sin(x", coords), ParseError);
  CHECK_THROWS_AS((void)parse("x^y", coords), ParseError);
}

TEST_CASE("printing round-trips through the parser") {
  for (const auto& s : corpus) {
    CAPTURE(s);
    Expr e = parse(s, coords);
    CHECK(parse(to_string(e), coords) == e);
  }
}

TEST_CASE("normalization preserves values") {
  std::mt19937_64 rng(7);
  for (const auto& s : corpus) {
    CAPTURE(s);
    Expr raw = parse_raw(s, coords);
    Expr e = normalize(raw);
    for (int k = 0; k < 10; ++k) {
      auto x = random_point(rng);
      const double a = oracle::tree_eval(raw, env_at(x));
      const double b = evaluate(e, coords, x);
      CHECK(close(a, b, 1e-12));
    }
  }
}

TEST_CASE("differentiation examples") {
  Expr t = Expr::coordinate("t");
  CHECK(differentiate(exp(Expr(2) * t), "t") == Expr(2) * exp(Expr(2) * t));
  Expr e = parse("exp(x2)*sin(x3)", coords);
  CHECK(differentiate(e, "x3") == parse("exp(x2)*cos(x3)", coords));
  CHECK(differentiate(e, "t").is_zero());

  // d/dr (r^2 c) with c a named constant, against a central difference
  Expr c = Expr::symbol("c");
  Expr f = Expr::coordinate("r") * Expr::coordinate("r") * c;
  Expr df = differentiate(f, "r");
  const std::map<std::string, double> consts{{"c", 0.7}};
  std::vector<double> x(coords.size(), 0.5);
  x[5] = 1.3;
  const double sym = evaluate(df, coords, x, consts);
  const double num = oracle::fd([&](const std::vector<double>& q) { return evaluate(f, coords, q, consts); }, x, 5);
  CHECK(close(sym, num, 1e-7));
}

TEST_CASE("derivatives agree with finite differences and commute") {
  std::mt19937_64 rng(11);
  for (const auto& s : corpus) {
    CAPTURE(s);
    Expr e = parse(s, coords);
    for (int k = 0; k < 10; ++k) {
      auto x = random_point(rng);
      for (int i : {0, 5, 6, 7}) {
        Expr d = differentiate(e, coords[static_cast<std::size_t>(i)]);
        const double sym = evaluate(d, coords, x);
        const double num = oracle::fd([&](const std::vector<double>& q) { return evaluate(e, coords, q); }, x, i);
        CHECK(close(sym, num, 1e-6));
        for (int j : {5, 6}) {
          const double a = evaluate(differentiate(d, coords[static_cast<std::size_t>(j)]), coords, x);
          const double b = evaluate(differentiate(differentiate(e, coords[static_cast<std::size_t>(j)]),
                                                  coords[static_cast<std::size_t>(i)]),
                                    coords, x);
          CHECK(close(a, b, 1e-9));
        }
      }
    }
  }
}

TEST_CASE("differentiation is linear") {
  std::mt19937_64 rng(3);
  Expr e1 = parse("sin(x)*exp(y)", coords);
  Expr e2 = parse("x^3/(1 + y^2)", coords);
  Expr a(Rational(5, 3));
  Expr lhs = differentiate(a * e1 + e2, "x");
  Expr rhs = a * differentiate(e1, "x") + differentiate(e2, "x");
  for (int k = 0; k < 10; ++k) {
    auto x = random_point(rng);
    CHECK(close(evaluate(lhs, coords, x), evaluate(rhs, coords, x), 1e-10));
  }
}

TEST_CASE("evaluation examples and errors") {
  std::vector<double> x(coords.size(), 0.0);
  CHECK(evaluate(parse("exp(2*t)", coords), coords, x) == doctest::Approx(1.0));
  x[4] = M_PI / 2;
  CHECK(evaluate(parse("exp(x2)*sin(x3)", coords), coords, x) == doctest::Approx(1.0));

  Expr g = parse("exp(2*t)*exp(x2)*sin(x3)", coords);
  std::vector<double> p(coords.size(), 0.0);
  p[0] = 0.1;
  p[3] = 0.2;
  p[4] = 0.3;
  CHECK(close(evaluate(g, coords, p), oracle::tree_eval(g, env_at(p)), 1e-12));

  std::vector<double> q(coords.size(), 0.0);
  q[6] = -1.0;
  try {
    (void)evaluate(parse("1 + sqrt(x)", coords), coords, q);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.subexpression().find("x") != std::string::npos);
  }
  q[6] = 0.0;
  CHECK_THROWS_AS((void)evaluate(parse("1/x", coords), coords, q), DomainError);
  Expr c = Expr::symbol("c");
  CHECK_THROWS_AS((void)evaluate(c * Expr::coordinate("x"), coords, q), UnboundSymbolError);
}

TEST_CASE("zero testing") {
  Chart chart("plane", {"t", "x"}, {{0.0, 1.0}, {-1.0, 1.0}});
  ZeroReport a = is_zero(chart.parse("sin(x)^2 + cos(x)^2 - 1"), chart);
  CHECK(a.verdict != ZeroVerdict::nonzero);
  CHECK(a.trials == 20);
  CHECK(is_zero(chart.parse("x - x"), chart).verdict == ZeroVerdict::proven_zero);
  ZeroReport c = is_zero(chart.parse("exp(t) - 1"), chart);
  REQUIRE(c.verdict == ZeroVerdict::nonzero);
  CHECK(std::fabs(std::exp(c.witness[0]) - 1) > 1e-6);
  CHECK(c.max_abs > 0.1);
}

TEST_CASE("taylor jets match derivatives") {
  Expr e = parse("exp(2*t)*exp(x2)*sin(x3)", coords);
  std::vector<double> p(coords.size(), 0.2);
  Program prog({e}, coords);
  auto jet = prog.evaluate_jet(p, 3)[0];
  std::vector<int> dt(coords.size(), 0);
  dt[0] = 1;
  CHECK(close(jet.partial(dt), evaluate(differentiate(e, "t"), coords, p), 1e-12));
  std::vector<int> d33(coords.size(), 0);
  d33[4] = 2;
  CHECK(close(jet.partial(d33), evaluate(differentiate(differentiate(e, "x3"), "x3"), coords, p), 1e-12));
  std::vector<int> mixed(coords.size(), 0);
  mixed[0] = 1;
  mixed[3] = 1;
  mixed[4] = 1;
  Expr m = differentiate(differentiate(differentiate(e, "t"), "x2"), "x3");
  CHECK(close(jet.partial(mixed), evaluate(m, coords, p), 1e-12));
}

TEST_CASE("catalog metric coefficients: symbolic derivatives match finite differences") {
  for (const auto& name : catalog_names()) {
    CatalogEntry e = catalog_entry(name);
    const Chart& c = e.metric.chart();
    CAPTURE(name);
    auto pts = c.sample(10, 5);
    for (const auto& comp : e.metric.components()) {
      Program f = c.compile({comp});
      for (int i = 0; i < c.dimension(); ++i) {
        Program d = c.compile({c.derivative(comp, i)});
        for (const auto& p : pts) {
          const double sym = d.evaluate(p)[0];
          const double num = oracle::fd([&](const std::vector<double>& q) { return f.evaluate(q)[0]; }, p, i);
          CHECK(close(sym, num, 1e-6));
        }
      }
    }
  }
}
