#include "einmob/enumerate.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace einmob {

namespace {

void require_n(int n) {
  if (n < 3) throw std::invalid_argument("dimension must be at least 3, got " + std::to_string(n));
}

int tri(int k) { return k * (k + 1) / 2; }

ValueList finish(int n, SignatureClass c, Regime r, const std::map<int, ValueTag>& m) {
  ValueList out;
  out.n = n;
  out.signature = c;
  out.regime = r;
  for (const auto& [v, t] : m) out.values.push_back({v, t});
  return out;
}

}  // namespace

std::string class_name(SignatureClass c) { return c == SignatureClass::riemannian ? "riemannian" : "lorentzian"; }

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::non_affine: return "non-affine";
    case Regime::affine_nonzero_scal: return "affine-nonzero-scal";
    case Regime::affine_ricci_flat: return "affine-ricci-flat";
    case Regime::projective_dims: return "projective-dims";
  }
  return "?";
}

std::string tag_name(ValueTag t) {
  switch (t) {
    case ValueTag::generic_shared: return "generic-shared";
    case ValueTag::lorentz_extra: return "lorentz-extra";
    case ValueTag::maximal: return "maximal";
  }
  return "?";
}

SignatureClass parse_class(const std::string& s) {
  if (s == "riemannian" || s == "riem") return SignatureClass::riemannian;
  if (s == "lorentzian" || s == "lor") return SignatureClass::lorentzian;
  throw std::invalid_argument("unknown signature class '" + s + "' (expected riemannian or lorentzian)");
}

Regime parse_regime(const std::string& s) {
  for (Regime r : {Regime::non_affine, Regime::affine_nonzero_scal, Regime::affine_ricci_flat, Regime::projective_dims}) {
    if (regime_name(r) == s) return r;
  }
  throw std::invalid_argument("unknown regime '" + s +
                              "' (expected non-affine, affine-nonzero-scal, affine-ricci-flat or projective-dims)");
}

std::vector<int> ValueList::plain() const {
  std::vector<int> out;
  for (const auto& v : values) out.push_back(v.value);
  return out;
}

bool ValueList::contains(int v) const {
  return std::any_of(values.begin(), values.end(), [v](const TaggedValue& t) { return t.value == v; });
}

ValueList mobility_values(int n, SignatureClass c) {
  require_n(n);
  std::map<int, ValueTag> m;
  for (int k = 0; k <= n - 4; ++k) {
    for (int l = 1; l <= (n + 1 - k) / 5; ++l) {
      if (tri(k) + l >= 2) m[tri(k) + l] = ValueTag::generic_shared;
    }
  }
  if (c == SignatureClass::lorentzian) {
    const int residue = ((n - 3) % 5 + 5) % 5;
    for (int k = 2; k <= n - 3; ++k) {
      if (k % 5 != residue) continue;
      const int v = tri(k) + (n + 2 - k) / 5;
      if (v >= 2 && !m.count(v)) m[v] = ValueTag::lorentz_extra;
    }
  }
  m[(n + 1) * (n + 2) / 2] = ValueTag::maximal;
  return finish(n, c, Regime::non_affine, m);
}

ValueList affine_only_values(int n, Regime regime) {
  require_n(n);
  std::map<int, ValueTag> m;
  if (regime == Regime::affine_nonzero_scal) {
    for (int k = 0; k <= n - 2; ++k) {
      for (int l = 1; l <= (n - k) / 2; ++l) m[tri(k) + l] = ValueTag::generic_shared;
    }
  } else if (regime == Regime::affine_ricci_flat) {
    for (int k = 0; k <= n - 4; ++k) {
      for (int l = 1; l <= (n - k) / 4; ++l) m[tri(k) + l] = ValueTag::generic_shared;
    }
  } else {
    throw std::invalid_argument("affine_only_values expects an affine regime");
  }
  m[n * (n + 1) / 2] = ValueTag::maximal;
  return finish(n, SignatureClass::riemannian, regime, m);
}

ValueList projective_dim_values(int n, SignatureClass c) {
  ValueList base = mobility_values(n, c);
  std::map<int, ValueTag> m;
  for (const auto& v : base.values) {
    if (v.value - 1 >= 1) m[v.value - 1] = v.tag;
  }
  return finish(n, c, Regime::projective_dims, m);
}

std::vector<Figure1Row> figure1_table(int from, int to) {
  if (from < 3 || to > 64 || from > to) throw std::invalid_argument("figure range must lie within [3, 64]");
  std::vector<Figure1Row> rows;
  for (int n = from; n <= to; ++n) {
    Figure1Row row;
    row.n = n;
    ValueList r = mobility_values(n, SignatureClass::riemannian);
    row.riemannian = r.plain();
    for (int v : mobility_values(n, SignatureClass::lorentzian).plain()) {
      if (!r.contains(v)) row.lorentz_extras.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace einmob
