#include "einmob/program.hpp"

#include <cmath>
#include <unordered_map>

namespace einmob {

Program::Program(const std::vector<Expr>& outputs, const std::vector<std::string>& coordinates,
                 const std::map<std::string, double>& constants)
    : ncoords_(coordinates.size()) {
  std::unordered_map<const ExprNode*, std::uint32_t> by_node;
  std::unordered_map<Expr, std::uint32_t, ExprHash> by_value;

  auto emit = [&](auto& self, const Expr& raw) -> std::uint32_t {
    auto hit = by_node.find(raw.node());
    if (hit != by_node.end()) return hit->second;
    Expr e = normalize(raw);
    auto vhit = by_value.find(e);
    if (vhit != by_value.end()) {
      by_node.emplace(raw.node(), vhit->second);
      return vhit->second;
    }
    Instr ins{};
    switch (e.kind()) {
      case ExprKind::constant:
        ins.op = Op::constant;
        ins.value = e.value().to_double();
        break;
      case ExprKind::coordinate: {
        ins.op = Op::coordinate;
        std::size_t i = 0;
        while (i < coordinates.size() && coordinates[i] != e.name()) ++i;
        if (i == coordinates.size()) throw UnboundSymbolError(e.name());
        ins.index = static_cast<std::uint32_t>(i);
        break;
      }
      case ExprKind::symbol: {
        auto c = constants.find(e.name());
        if (c == constants.end()) throw UnboundSymbolError(e.name());
        ins.op = Op::constant;
        ins.value = c->second;
        break;
      }
      case ExprKind::sum:
      case ExprKind::product:
      case ExprKind::power:
      case ExprKind::function: {
        std::vector<std::uint32_t> args;
        for (const auto& a : e.args()) args.push_back(self(self, a));
        ins.op = e.kind() == ExprKind::sum       ? Op::sum
                 : e.kind() == ExprKind::product ? Op::product
                 : e.kind() == ExprKind::power   ? Op::power
                                                 : Op::function;
        ins.func = e.func();
        if (e.kind() == ExprKind::power) {
          ins.value = e.value().to_double();
          ins.integer_exponent = e.value().is_integer();
        }
        ins.first = static_cast<std::uint32_t>(operands_.size());
        ins.count = static_cast<std::uint32_t>(args.size());
        operands_.insert(operands_.end(), args.begin(), args.end());
        break;
      }
      default:
        throw std::logic_error("unnormalized node in program");
    }
    auto slot = static_cast<std::uint32_t>(ops_.size());
    ops_.push_back(ins);
    sources_.push_back(e);
    by_node.emplace(raw.node(), slot);
    by_value.emplace(e, slot);
    return slot;
  };
  for (const auto& o : outputs) outputs_.push_back(emit(emit, o));
}

void Program::domain_error(std::size_t slot, const std::string& what) const {
  throw DomainError(what, to_string(sources_[slot]));
}

std::vector<double> Program::evaluate(std::span<const double> x, double* scale) const {
  if (x.size() != ncoords_) throw std::invalid_argument("coordinate count mismatch");
  std::vector<double> v(ops_.size());
  double biggest = 0;
  for (std::size_t s = 0; s < ops_.size(); ++s) {
    const Instr& ins = ops_[s];
    const std::uint32_t* a = operands_.data() + ins.first;
    double r = 0;
    switch (ins.op) {
      case Op::constant:
        r = ins.value;
        break;
      case Op::coordinate:
        r = x[ins.index];
        break;
      case Op::sum:
        for (std::uint32_t k = 0; k < ins.count; ++k) r += v[a[k]];
        break;
      case Op::product:
        r = 1;
        for (std::uint32_t k = 0; k < ins.count; ++k) r *= v[a[k]];
        break;
      case Op::power: {
        double b = v[a[0]];
        if (b == 0 && ins.value < 0) domain_error(s, "division by zero");
        if (b < 0 && !ins.integer_exponent) domain_error(s, "non-integer power of a negative value");
        r = std::pow(b, ins.value);
        break;
      }
      case Op::function: {
        double u = v[a[0]];
        switch (ins.func) {
          case Func::exp:
            r = std::exp(u);
            break;
          case Func::sin:
            r = std::sin(u);
            break;
          case Func::cos:
            r = std::cos(u);
            break;
          case Func::sinh:
            r = std::sinh(u);
            break;
          case Func::cosh:
            r = std::cosh(u);
            break;
          case Func::sqrt:
            if (u < 0) domain_error(s, "square root of a negative value");
            r = std::sqrt(u);
            break;
          case Func::abs:
            r = std::fabs(u);
            break;
        }
        break;
      }
    }
    if (!std::isfinite(r)) domain_error(s, "non-finite value");
    v[s] = r;
    biggest = std::max(biggest, std::fabs(r));
  }
  if (scale) *scale = biggest;
  std::vector<double> out(outputs_.size());
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = v[outputs_[i]];
  return out;
}

std::vector<Jet> Program::evaluate_jet(std::span<const double> x, int order) const {
  if (x.size() != ncoords_) throw std::invalid_argument("coordinate count mismatch");
  auto space_ptr = JetSpace::get(static_cast<int>(ncoords_), order);
  const JetSpace* space = space_ptr.get();
  std::vector<Jet> v(ops_.size());
  for (std::size_t s = 0; s < ops_.size(); ++s) {
    const Instr& ins = ops_[s];
    const std::uint32_t* a = operands_.data() + ins.first;
    try {
      switch (ins.op) {
        case Op::constant:
          v[s] = Jet::constant(space, order, ins.value);
          break;
        case Op::coordinate:
          v[s] = Jet::variable(space, order, static_cast<int>(ins.index), x[ins.index]);
          break;
        case Op::sum: {
          Jet r(space, order);
          for (std::uint32_t k = 0; k < ins.count; ++k) r += v[a[k]];
          v[s] = std::move(r);
          break;
        }
        case Op::product: {
          Jet r = v[a[0]];
          for (std::uint32_t k = 1; k < ins.count; ++k) r = r * v[a[k]];
          v[s] = std::move(r);
          break;
        }
        case Op::power:
          v[s] = power(v[a[0]], ins.value, ins.integer_exponent);
          break;
        case Op::function: {
          const Jet& u = v[a[0]];
          switch (ins.func) {
            case Func::exp:
              v[s] = exp(u);
              break;
            case Func::sin:
              v[s] = sin(u);
              break;
            case Func::cos:
              v[s] = cos(u);
              break;
            case Func::sinh:
              v[s] = sinh(u);
              break;
            case Func::cosh:
              v[s] = cosh(u);
              break;
            case Func::sqrt:
              v[s] = power(u, 0.5, false);
              break;
            case Func::abs:
              if (u.value() == 0) domain_error(s, "abs is not differentiable at zero");
              v[s] = u.value() < 0 ? -u : u;
              break;
          }
          break;
        }
      }
    } catch (const std::domain_error& e) {
      if (dynamic_cast<const DomainError*>(&e)) throw;
      domain_error(s, e.what());
    }
    if (!std::isfinite(v[s].value())) domain_error(s, "non-finite value");
  }
  std::vector<Jet> out;
  out.reserve(outputs_.size());
  for (auto o : outputs_) out.push_back(v[o]);
  return out;
}

double evaluate(const Expr& e, const std::vector<std::string>& coordinates, std::span<const double> x,
                const std::map<std::string, double>& constants) {
  return Program({e}, coordinates, constants).evaluate(x)[0];
}

}  // namespace einmob
