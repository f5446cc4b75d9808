#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "einmob/expr.hpp"

namespace einmob {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(const std::string& name, std::size_t offset, std::vector<std::string> admissible);
  [[nodiscard]] const std::string& identifier() const { return name_; }
  [[nodiscard]] const std::vector<std::string>& admissible() const { return admissible_; }

 private:
  std::string name_;
  std::vector<std::string> admissible_;
};

/// Parses an expression over the given coordinate and named-constant names.
///
/// Grammar: decimal literals ("2", "0.25", "1e-5"), identifiers, + - * / ^,
/// parentheses, unary minus and the calls exp sin cos sinh cosh sqrt abs.
/// '^' is right associative, binds tighter than unary minus and takes a
/// constant rational exponent. The result is normalized.
[[nodiscard]] Expr parse(std::string_view text, const std::vector<std::string>& coordinates,
                         const std::vector<std::string>& constants = {});

/// Same grammar, returning the raw tree without normalization.
[[nodiscard]] Expr parse_raw(std::string_view text, const std::vector<std::string>& coordinates,
                             const std::vector<std::string>& constants = {});

}  // namespace einmob
