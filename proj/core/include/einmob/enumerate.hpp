#pragma once

#include <string>
#include <vector>

namespace einmob {

enum class SignatureClass { riemannian, lorentzian };
enum class Regime { non_affine, affine_nonzero_scal, affine_ricci_flat, projective_dims };
enum class ValueTag { generic_shared, lorentz_extra, maximal };

[[nodiscard]] std::string class_name(SignatureClass c);
[[nodiscard]] std::string regime_name(Regime r);
[[nodiscard]] std::string tag_name(ValueTag t);
/// Accepts "riemannian"/"lorentzian" (and the short forms "riem"/"lor").
[[nodiscard]] SignatureClass parse_class(const std::string& s);
/// Accepts "non-affine", "affine-nonzero-scal", "affine-ricci-flat", "projective-dims".
[[nodiscard]] Regime parse_regime(const std::string& s);

struct TaggedValue {
  int value = 0;
  ValueTag tag = ValueTag::generic_shared;
};

/// Sorted, duplicate-free list of admissible integers.
struct ValueList {
  int n = 0;
  SignatureClass signature = SignatureClass::riemannian;
  Regime regime = Regime::non_affine;
  std::vector<TaggedValue> values;

  [[nodiscard]] std::vector<int> plain() const;
  [[nodiscard]] bool contains(int v) const;
};

/// Admissible degrees of mobility >= 2 of Einstein metrics admitting a
/// nonaffine projectively equivalent metric.
[[nodiscard]] ValueList mobility_values(int n, SignatureClass c);

/// Dimensions of the space of parallel symmetric (0,2)-tensors in the
/// affine-only case, either with nonzero scalar curvature or Ricci flat.
[[nodiscard]] ValueList affine_only_values(int n, Regime regime);

/// Admissible dimensions of the space of essential projective vector fields.
[[nodiscard]] ValueList projective_dim_values(int n, SignatureClass c);

struct Figure1Row {
  int n = 0;
  std::vector<int> riemannian;
  std::vector<int> lorentz_extras;
};

[[nodiscard]] std::vector<Figure1Row> figure1_table(int from, int to);

}  // namespace einmob
