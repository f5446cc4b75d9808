#include "einmob/calculus.hpp"

#include <unordered_map>
#include <vector>

namespace einmob {

namespace {

class Differentiator {
 public:
  explicit Differentiator(const std::string& x) : x_(x) {}

  Expr operator()(const Expr& e) {
    auto it = memo_.find(e.node());
    if (it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(e.node(), d);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::constant:
      case ExprKind::symbol:
        return Expr(0);
      case ExprKind::coordinate:
        return Expr(e.name() == x_ ? 1 : 0);
      case ExprKind::sum: {
        std::vector<Expr> terms;
        for (const auto& t : e.args()) {
          Expr dt = (*this)(t);
          if (!dt.is_zero()) terms.push_back(dt);
        }
        return sum(terms);
      }
      case ExprKind::product: {
        const auto& f = e.args();
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < f.size(); ++i) {
          Expr di = (*this)(f[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> factors(f.begin(), f.end());
          factors[i] = di;
          terms.push_back(product(factors));
        }
        return sum(terms);
      }
      case ExprKind::power: {
        const Expr& b = e.args()[0];
        Expr db = (*this)(b);
        if (db.is_zero()) return Expr(0);
        const Rational& k = e.value();
        return Expr(k) * pow(b, k - Rational(1)) * db;
      }
      case ExprKind::quotient: {
        const Expr& a = e.args()[0];
        const Expr& b = e.args()[1];
        return ((*this)(a) * b - a * (*this)(b)) / pow(b, Rational(2));
      }
      case ExprKind::negate:
        return -(*this)(e.args()[0]);
      case ExprKind::function: {
        const Expr& u = e.args()[0];
        Expr du = (*this)(u);
        if (du.is_zero()) return Expr(0);
        switch (e.func()) {
          case Func::exp:
            return normalize(e) * du;
          case Func::sin:
            return cos(u) * du;
          case Func::cos:
            return -sin(u) * du;
          case Func::sinh:
            return cosh(u) * du;
          case Func::cosh:
            return sinh(u) * du;
          case Func::sqrt:
            return Expr(Rational(1, 2)) * pow(u, Rational(-1, 2)) * du;
          case Func::abs:
            return u * pow(abs(u), Rational(-1)) * du;
        }
      }
    }
    return Expr(0);
  }

  std::string x_;
  std::unordered_map<const ExprNode*, Expr> memo_;
};

Expr rebuild(const Expr& e, const std::vector<Expr>& args) {
  switch (e.kind()) {
    case ExprKind::sum:
      return sum(args);
    case ExprKind::product:
      return product(args);
    case ExprKind::power:
      return pow(args[0], e.value());
    case ExprKind::quotient:
      return args[0] / args[1];
    case ExprKind::negate:
      return -args[0];
    case ExprKind::function:
      return apply(e.func(), args[0]);
    default:
      return e;
  }
}

void collect(const Expr& e, ExprKind kind, std::set<std::string>& out,
             std::unordered_map<const ExprNode*, bool>& seen) {
  if (!seen.emplace(e.node(), true).second) return;
  if (e.kind() == kind) out.insert(e.name());
  for (const auto& a : e.args()) collect(a, kind, out, seen);
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& x) { return Differentiator(x)(normalize(e)); }

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
  std::unordered_map<const ExprNode*, Expr> memo;
  auto go = [&](auto& self, const Expr& x) -> Expr {
    auto it = memo.find(x.node());
    if (it != memo.end()) return it->second;
    Expr out;
    if (x.kind() == ExprKind::coordinate || x.kind() == ExprKind::symbol) {
      auto r = replacements.find(x.name());
      out = r == replacements.end() ? x : r->second;
    } else if (x.args().empty()) {
      out = x;
    } else {
      std::vector<Expr> args;
      args.reserve(x.args().size());
      for (const auto& a : x.args()) args.push_back(self(self, a));
      out = rebuild(x, args);
    }
    memo.emplace(x.node(), out);
    return out;
  };
  return go(go, e);
}

std::set<std::string> coordinate_names(const Expr& e) {
  std::set<std::string> out;
  std::unordered_map<const ExprNode*, bool> seen;
  collect(e, ExprKind::coordinate, out, seen);
  return out;
}

std::set<std::string> symbol_names(const Expr& e) {
  std::set<std::string> out;
  std::unordered_map<const ExprNode*, bool> seen;
  collect(e, ExprKind::symbol, out, seen);
  return out;
}

}  // namespace einmob
