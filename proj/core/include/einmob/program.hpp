#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "einmob/expr.hpp"
#include "einmob/jet.hpp"

namespace einmob {

class UnboundSymbolError : public std::runtime_error {
 public:
  explicit UnboundSymbolError(const std::string& name)
      : std::runtime_error("unbound symbol '" + name + "'"), name_(name) {}
  [[nodiscard]] const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A batch of expressions compiled to a flat instruction tape over the
/// coordinates of a chart, with named constants bound at compile time.
/// Shared subexpressions are evaluated once.
class Program {
 public:
  Program() = default;
  Program(const std::vector<Expr>& outputs, const std::vector<std::string>& coordinates,
          const std::map<std::string, double>& constants = {});

  [[nodiscard]] std::size_t output_count() const { return outputs_.size(); }
  [[nodiscard]] std::size_t tape_size() const { return ops_.size(); }

  /// Evaluates all outputs. Domain violations raise DomainError naming the
  /// offending subexpression. If `scale` is given it receives the largest
  /// absolute value of any intermediate result.
  [[nodiscard]] std::vector<double> evaluate(std::span<const double> x, double* scale = nullptr) const;

  /// Taylor expansions of all outputs around `x` up to `order`.
  [[nodiscard]] std::vector<Jet> evaluate_jet(std::span<const double> x, int order) const;

 private:
  enum class Op : std::uint8_t { constant, coordinate, sum, product, power, function };
  struct Instr {
    Op op;
    Func func = Func::exp;
    bool integer_exponent = false;
    double value = 0;  // constant value or exponent
    std::uint32_t index = 0;  // coordinate index
    std::uint32_t first = 0, count = 0;  // operand range in operands_
  };
  std::vector<Instr> ops_;
  std::vector<std::uint32_t> operands_;
  std::vector<std::uint32_t> outputs_;
  std::vector<Expr> sources_;
  std::size_t ncoords_ = 0;

  [[noreturn]] void domain_error(std::size_t slot, const std::string& what) const;
};

/// One-shot evaluation of a single expression.
[[nodiscard]] double evaluate(const Expr& e, const std::vector<std::string>& coordinates, std::span<const double> x,
                              const std::map<std::string, double>& constants = {});

}  // namespace einmob
