#pragma once

#include <map>
#include <set>
#include <string>

#include "einmob/expr.hpp"

namespace einmob {

/// Exact partial derivative with respect to the coordinate `x`, normalized.
[[nodiscard]] Expr differentiate(const Expr& e, const std::string& x);

/// Replaces coordinates and named constants by the given expressions.
[[nodiscard]] Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);

/// Names of coordinates (resp. named constants) occurring in `e`.
[[nodiscard]] std::set<std::string> coordinate_names(const Expr& e);
[[nodiscard]] std::set<std::string> symbol_names(const Expr& e);

}  // namespace einmob
