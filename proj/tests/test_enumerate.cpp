#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <iterator>
#include <set>

#include "einmob/enumerate.hpp"
#include "oracles/oracles.hpp"

using namespace einmob;

namespace {

std::set<int> as_set(const ValueList& v) {
  auto p = v.plain();
  return {p.begin(), p.end()};
}

std::set<int> shifted(const std::set<int>& s) {
  std::set<int> out;
  for (int v : s) {
    if (v - 1 >= 1) out.insert(v - 1);
  }
  return out;
}

}  // namespace

TEST_CASE("mobility values match the brute-force enumeration for n = 3..64") {
  for (int n = 3; n <= 64; ++n) {
    CAPTURE(n);
    for (bool lor : {false, true}) {
      ValueList v = mobility_values(n, lor ? SignatureClass::lorentzian : SignatureClass::riemannian);
      CHECK(as_set(v) == oracle::mobility_list(n, lor));
      auto p = v.plain();
      CHECK(std::is_sorted(p.begin(), p.end()));
      CHECK(std::adjacent_find(p.begin(), p.end()) == p.end());
      CHECK(p.back() == (n + 1) * (n + 2) / 2);
      CHECK(v.values.back().tag == ValueTag::maximal);
      CHECK(v.n == n);
    }
  }
}

TEST_CASE("small dimensions") {
  CHECK(mobility_values(3, SignatureClass::riemannian).plain() == std::vector<int>{10});
  CHECK(mobility_values(4, SignatureClass::riemannian).plain() == std::vector<int>{15});
  CHECK(mobility_values(4, SignatureClass::lorentzian).plain() == std::vector<int>{15});
  CHECK(mobility_values(5, SignatureClass::riemannian).plain() == std::vector<int>{2, 21});
  CHECK(mobility_values(5, SignatureClass::lorentzian).plain() == std::vector<int>{2, 4, 21});
}

TEST_CASE("Riemannian list is contained in the Lorentzian list, strictly from n = 5") {
  int first_strict = 0;
  for (int n = 3; n <= 64; ++n) {
    CAPTURE(n);
    auto r = as_set(mobility_values(n, SignatureClass::riemannian));
    auto l = as_set(mobility_values(n, SignatureClass::lorentzian));
    CHECK(std::includes(l.begin(), l.end(), r.begin(), r.end()));
    if (first_strict == 0 && l.size() > r.size()) first_strict = n;
  }
  CHECK(first_strict == 5);
}

TEST_CASE("tags mark the Lorentz-only values") {
  for (int n = 3; n <= 30; ++n) {
    CAPTURE(n);
    auto r = as_set(mobility_values(n, SignatureClass::riemannian));
    for (const auto& t : mobility_values(n, SignatureClass::lorentzian).values) {
      if (t.tag == ValueTag::lorentz_extra) CHECK(r.count(t.value) == 0);
      if (t.tag == ValueTag::generic_shared) CHECK(r.count(t.value) == 1);
    }
    for (const auto& t : mobility_values(n, SignatureClass::riemannian).values) CHECK(t.tag != ValueTag::lorentz_extra);
  }
}

TEST_CASE("projective dimensions are the mobility values shifted by one") {
  for (int n = 3; n <= 64; ++n) {
    CAPTURE(n);
    for (bool lor : {false, true}) {
      const auto c = lor ? SignatureClass::lorentzian : SignatureClass::riemannian;
      CHECK(as_set(projective_dim_values(n, c)) == shifted(oracle::mobility_list(n, lor)));
    }
  }
  CHECK(projective_dim_values(5, SignatureClass::riemannian).plain() == std::vector<int>{1, 20});
  CHECK(projective_dim_values(5, SignatureClass::lorentzian).plain() == std::vector<int>{1, 3, 20});
  CHECK(projective_dim_values(3, SignatureClass::riemannian).plain() == std::vector<int>{9});
}

TEST_CASE("affine-only lists") {
  for (int n = 3; n <= 64; ++n) {
    CAPTURE(n);
    CHECK(as_set(affine_only_values(n, Regime::affine_nonzero_scal)) == oracle::affine_list(n, false));
    CHECK(as_set(affine_only_values(n, Regime::affine_ricci_flat)) == oracle::affine_list(n, true));
    CHECK(affine_only_values(n, Regime::affine_nonzero_scal).contains(n * (n + 1) / 2));
  }
  CHECK(affine_only_values(4, Regime::affine_nonzero_scal).plain() == std::vector<int>{1, 2, 4, 10});
  CHECK(affine_only_values(3, Regime::affine_nonzero_scal).contains(6));
  CHECK_THROWS_AS((void)affine_only_values(5, Regime::non_affine), std::invalid_argument);
}

TEST_CASE("figure 1 rows") {
  auto rows = figure1_table(3, 15);
  REQUIRE(rows.size() == 13);
  for (const auto& row : rows) {
    CAPTURE(row.n);
    auto r = oracle::mobility_list(row.n, false);
    auto l = oracle::mobility_list(row.n, true);
    CHECK(std::set<int>(row.riemannian.begin(), row.riemannian.end()) == r);
    std::set<int> extras;
    std::set_difference(l.begin(), l.end(), r.begin(), r.end(), std::inserter(extras, extras.end()));
    CHECK(std::set<int>(row.lorentz_extras.begin(), row.lorentz_extras.end()) == extras);
  }
  CHECK(rows[0].riemannian == std::vector<int>{10});
  CHECK(rows[0].lorentz_extras.empty());
  CHECK_THROWS_AS((void)figure1_table(2, 10), std::invalid_argument);
  CHECK_THROWS_AS((void)figure1_table(3, 65), std::invalid_argument);
}

TEST_CASE("input validation and names") {
  CHECK_THROWS_AS((void)mobility_values(2, SignatureClass::riemannian), std::invalid_argument);
  CHECK_THROWS_AS((void)projective_dim_values(1, SignatureClass::lorentzian), std::invalid_argument);
  CHECK_THROWS_AS((void)affine_only_values(2, Regime::affine_ricci_flat), std::invalid_argument);
  CHECK(parse_class("lorentzian") == SignatureClass::lorentzian);
  CHECK(parse_class("riem") == SignatureClass::riemannian);
  CHECK_THROWS_AS((void)parse_class("euclid"), std::invalid_argument);
  for (Regime r : {Regime::non_affine, Regime::affine_nonzero_scal, Regime::affine_ricci_flat, Regime::projective_dims}) {
    CHECK(parse_regime(regime_name(r)) == r);
  }
  CHECK(class_name(SignatureClass::riemannian) == "riemannian");
  CHECK(tag_name(ValueTag::lorentz_extra) == "lorentz-extra");
}
