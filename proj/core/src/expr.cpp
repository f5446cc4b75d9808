#include "einmob/expr.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace einmob {

namespace {

// Distribution of a product over sums is skipped when it would create more
// terms than this.
constexpr std::size_t kMaxDistributedTerms = 64;

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t compute_hash(const ExprNode& n) {
  std::size_t h = std::hash<int>{}(static_cast<int>(n.kind));
  switch (n.kind) {
    case ExprKind::constant:
      h = mix(h, n.value.hash());
      break;
    case ExprKind::coordinate:
    case ExprKind::symbol:
      h = mix(h, std::hash<std::string>{}(n.name));
      break;
    case ExprKind::power:
      h = mix(h, n.value.hash());
      break;
    case ExprKind::function:
      h = mix(h, static_cast<std::size_t>(n.func) + 101);
      break;
    default:
      break;
  }
  for (const auto& a : n.args) h = mix(h, a.hash());
  return h;
}

int kind_rank(ExprKind k) {
  switch (k) {
    case ExprKind::constant:
      return 0;
    case ExprKind::coordinate:
      return 1;
    case ExprKind::symbol:
      return 2;
    case ExprKind::function:
      return 3;
    case ExprKind::power:
      return 4;
    case ExprKind::product:
      return 5;
    case ExprKind::sum:
      return 6;
    case ExprKind::quotient:
      return 7;
    case ExprKind::negate:
      return 8;
  }
  return 9;
}

int compare_rational(const Rational& a, const Rational& b) {
  if (a == b) return 0;
  return a < b ? -1 : 1;
}

}  // namespace

struct ExprFactory {
  static Expr node(ExprKind kind, std::vector<Expr> args, bool normal, Rational value = Rational(),
                   std::string name = {}, Func func = Func::exp) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->args = std::move(args);
    n->normal = normal;
    n->value = value;
    n->name = std::move(name);
    n->func = func;
    n->hash = compute_hash(*n);
    return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
  }
};

const char* func_name(Func f) {
  switch (f) {
    case Func::exp:
      return "exp";
    case Func::sin:
      return "sin";
    case Func::cos:
      return "cos";
    case Func::sinh:
      return "sinh";
    case Func::cosh:
      return "cosh";
    case Func::sqrt:
      return "sqrt";
    case Func::abs:
      return "abs";
  }
  return "?";
}

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(std::int64_t value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value) { *this = ExprFactory::node(ExprKind::constant, {}, true, value); }

Expr Expr::coordinate(std::string name) {
  return ExprFactory::node(ExprKind::coordinate, {}, true, Rational(), std::move(name));
}
Expr Expr::symbol(std::string name) {
  return ExprFactory::node(ExprKind::symbol, {}, true, Rational(), std::move(name));
}
Expr Expr::make_sum(std::vector<Expr> terms) { return ExprFactory::node(ExprKind::sum, std::move(terms), false); }
Expr Expr::make_product(std::vector<Expr> factors) {
  return ExprFactory::node(ExprKind::product, std::move(factors), false);
}
Expr Expr::make_power(Expr base, Rational exponent) {
  return ExprFactory::node(ExprKind::power, {std::move(base)}, false, exponent);
}
Expr Expr::make_quotient(Expr numerator, Expr denominator) {
  return ExprFactory::node(ExprKind::quotient, {std::move(numerator), std::move(denominator)}, false);
}
Expr Expr::make_negate(Expr operand) { return ExprFactory::node(ExprKind::negate, {std::move(operand)}, false); }
Expr Expr::make_function(Func f, Expr argument) {
  return ExprFactory::node(ExprKind::function, {std::move(argument)}, false, Rational(), {}, f);
}

ExprKind Expr::kind() const { return node_->kind; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->func; }
bool Expr::is_normalized() const { return node_->normal; }
std::size_t Expr::hash() const { return node_->hash; }
bool Expr::is_zero() const { return kind() == ExprKind::constant && value().is_zero(); }
bool Expr::is_one() const { return kind() == ExprKind::constant && value().is_one(); }

std::size_t Expr::node_count() const {
  std::unordered_set<const ExprNode*> seen;
  std::vector<const ExprNode*> stack{node_.get()};
  while (!stack.empty()) {
    const ExprNode* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& a : n->args) stack.push_back(a.node());
  }
  return seen.size();
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

int compare(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return 0;
  if (a.kind() != b.kind()) return kind_rank(a.kind()) < kind_rank(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case ExprKind::constant:
      return compare_rational(a.value(), b.value());
    case ExprKind::coordinate:
    case ExprKind::symbol:
      return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case ExprKind::function:
      if (a.func() != b.func()) return a.func() < b.func() ? -1 : 1;
      return compare(a.args()[0], b.args()[0]);
    case ExprKind::power: {
      int c = compare(a.args()[0], b.args()[0]);
      if (c != 0) return c;
      return compare_rational(a.value(), b.value());
    }
    default: {
      const auto& x = a.args();
      const auto& y = b.args();
      std::size_t m = std::min(x.size(), y.size());
      for (std::size_t i = 0; i < m; ++i) {
        int c = compare(x[i], y[i]);
        if (c != 0) return c;
      }
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      return 0;
    }
  }
}

// ---------------------------------------------------------------------------
// Normalizing builders. All inputs are assumed normalized.

namespace {

Expr make_normal(ExprKind kind, std::vector<Expr> args, Rational value = Rational(), Func f = Func::exp) {
  return ExprFactory::node(kind, std::move(args), true, value, {}, f);
}

Expr add_normal(const std::vector<Expr>& terms);
Expr mul_normal(const std::vector<Expr>& factors);
Expr pow_normal(const Expr& base, const Rational& e);
Expr apply_normal(Func f, const Expr& a);

// Splits a normalized term into (coefficient, monomial).
std::pair<Rational, Expr> split_coefficient(const Expr& t) {
  if (t.kind() == ExprKind::constant) return {t.value(), Expr(1)};
  if (t.kind() == ExprKind::product && t.args()[0].kind() == ExprKind::constant) {
    const auto& a = t.args();
    if (a.size() == 2) return {a[0].value(), a[1]};
    return {a[0].value(), make_normal(ExprKind::product, std::vector<Expr>(a.begin() + 1, a.end()))};
  }
  return {Rational(1), t};
}

Expr with_coefficient(const Rational& c, const Expr& monomial) {
  if (c.is_zero()) return Expr(0);
  if (c.is_one()) return monomial;
  if (monomial.kind() == ExprKind::product) {
    std::vector<Expr> args;
    args.reserve(monomial.args().size() + 1);
    args.emplace_back(c);
    args.insert(args.end(), monomial.args().begin(), monomial.args().end());
    return make_normal(ExprKind::product, std::move(args));
  }
  return make_normal(ExprKind::product, {Expr(c), monomial});
}

void flatten_terms(const Expr& t, Rational& constant, std::map<Expr, Rational, ExprLess>& collected) {
  if (t.kind() == ExprKind::sum) {
    for (const auto& a : t.args()) flatten_terms(a, constant, collected);
    return;
  }
  if (t.kind() == ExprKind::constant) {
    constant += t.value();
    return;
  }
  auto [c, m] = split_coefficient(t);
  auto it = collected.find(m);
  if (it == collected.end()) {
    collected.emplace(m, c);
  } else {
    it->second += c;
  }
}

Expr add_normal(const std::vector<Expr>& terms) {
  Rational constant(0);
  std::map<Expr, Rational, ExprLess> collected;
  for (const auto& t : terms) flatten_terms(t, constant, collected);
  std::vector<Expr> out;
  if (!constant.is_zero()) out.emplace_back(constant);
  for (const auto& [m, c] : collected) {
    if (!c.is_zero()) out.push_back(with_coefficient(c, m));
  }
  if (out.empty()) return Expr(0);
  if (out.size() == 1) return out[0];
  return make_normal(ExprKind::sum, std::move(out));
}

// Coefficient of the leading non-constant term of a normalized sum.
Rational leading_coefficient(const Expr& s) {
  for (const auto& t : s.args()) {
    if (t.kind() == ExprKind::constant) continue;
    return split_coefficient(t).first;
  }
  return Rational(1);
}

Expr scale_sum(const Expr& s, const Rational& c) {
  std::vector<Expr> terms;
  terms.reserve(s.args().size());
  for (const auto& t : s.args()) {
    auto [k, m] = split_coefficient(t);
    if (t.kind() == ExprKind::constant) {
      terms.emplace_back(t.value() * c);
    } else {
      terms.push_back(with_coefficient(k * c, m));
    }
  }
  return make_normal(ExprKind::sum, std::move(terms));
}

struct FactorCollector {
  Rational coefficient{1};
  std::map<Expr, Rational, ExprLess> powers;  // base -> exponent
  std::vector<Expr> exp_arguments;
  // Factors that cannot be merged (powers with non-integer exponent of
  // non-positive-definite bases keep their own identity as bases too).

  void add_power(const Expr& base, const Rational& e) {
    auto it = powers.find(base);
    if (it == powers.end()) {
      powers.emplace(base, e);
    } else {
      it->second += e;
    }
  }

  void add(const Expr& f) {
    switch (f.kind()) {
      case ExprKind::constant:
        coefficient *= f.value();
        return;
      case ExprKind::product:
        for (const auto& a : f.args()) add(a);
        return;
      case ExprKind::power:
        add_power(f.args()[0], f.value());
        return;
      case ExprKind::function:
        if (f.func() == Func::exp) {
          exp_arguments.push_back(f.args()[0]);
          return;
        }
        add_power(f, Rational(1));
        return;
      case ExprKind::sum: {
        // Pull out the leading coefficient so that c*S and S share a base.
        Rational c = leading_coefficient(f);
        if (!c.is_one()) {
          coefficient *= c;
          add_power(scale_sum(f, Rational(1) / c), Rational(1));
        } else {
          add_power(f, Rational(1));
        }
        return;
      }
      default:
        add_power(f, Rational(1));
        return;
    }
  }
};

Expr mul_normal(const std::vector<Expr>& factors) {
  FactorCollector fc;
  for (const auto& f : factors) {
    fc.add(f);
    if (fc.coefficient.is_zero()) return Expr(0);
  }
  std::vector<Expr> out;
  std::vector<Expr> sums;
  // Powers whose normalization produced a new product are re-collected once.
  std::vector<Expr> deferred;
  for (const auto& [base, e] : fc.powers) {
    if (e.is_zero()) continue;
    if (base.kind() == ExprKind::sum && e.is_one()) {
      sums.push_back(base);
      continue;
    }
    Expr p = pow_normal(base, e);
    if (p.kind() == ExprKind::constant) {
      fc.coefficient *= p.value();
    } else if (p.kind() == ExprKind::product) {
      deferred.push_back(p);
    } else if (p.kind() == ExprKind::function && p.func() == Func::exp) {
      fc.exp_arguments.push_back(p.args()[0]);
    } else {
      out.push_back(p);
    }
  }
  for (const auto& d : deferred) {
    for (const auto& a : d.args()) {
      if (a.kind() == ExprKind::constant) {
        fc.coefficient *= a.value();
      } else if (a.kind() == ExprKind::function && a.func() == Func::exp) {
        fc.exp_arguments.push_back(a.args()[0]);
      } else {
        out.push_back(a);
      }
    }
  }
  if (fc.coefficient.is_zero()) return Expr(0);
  if (!fc.exp_arguments.empty()) {
    Expr arg = add_normal(fc.exp_arguments);
    if (!arg.is_zero()) out.push_back(apply_normal(Func::exp, arg));
  }
  std::sort(out.begin(), out.end(), ExprLess{});

  if (!sums.empty()) {
    std::size_t count = 1;
    for (const auto& s : sums) count *= s.args().size();
    if (count <= kMaxDistributedTerms) {
      std::vector<Expr> partial{with_coefficient(fc.coefficient,
                                                 out.empty() ? Expr(1)
                                                 : out.size() == 1
                                                     ? out[0]
                                                     : make_normal(ExprKind::product, out))};
      for (const auto& s : sums) {
        std::vector<Expr> next;
        next.reserve(partial.size() * s.args().size());
        for (const auto& p : partial) {
          for (const auto& t : s.args()) next.push_back(mul_normal({p, t}));
        }
        partial = std::move(next);
      }
      return add_normal(partial);
    }
    out.insert(out.end(), sums.begin(), sums.end());
    std::sort(out.begin(), out.end(), ExprLess{});
  }

  if (out.empty()) return Expr(fc.coefficient);
  if (out.size() == 1 && fc.coefficient.is_one()) return out[0];
  if (fc.coefficient.is_one()) return make_normal(ExprKind::product, std::move(out));
  out.insert(out.begin(), Expr(fc.coefficient));
  return make_normal(ExprKind::product, std::move(out));
}

// Largest integer <= r.
std::int64_t floor_rational(const Rational& r) {
  std::int64_t q = r.num() / r.den();
  if (r.num() % r.den() != 0 && r.is_negative()) --q;
  return q;
}

Expr pow_normal(const Expr& base, const Rational& e) {
  if (e.is_zero()) return Expr(1);
  if (e.is_one()) return base;
  switch (base.kind()) {
    case ExprKind::constant: {
      const Rational& c = base.value();
      if (c.is_zero()) {
        if (e.is_negative()) throw DomainError("division by zero", "0^(" + e.to_string() + ")");
        return Expr(0);
      }
      if (auto exact = c.exact_pow(e)) return Expr(*exact);
      if (c.is_negative()) {
        if (e.den() % 2 == 0) throw DomainError("even root of negative constant", c.to_string());
        // (-c)^(p/q) with odd q.
        Expr mag = pow_normal(Expr(-c), e);
        return mul_normal({Expr(e.num() % 2 == 0 ? 1 : -1), mag});
      }
      // Split c^e = c^floor(e) * c^frac(e), and c = num/den into separate bases
      // so that equal irrational powers merge.
      std::int64_t whole = floor_rational(e);
      Rational frac = e - Rational(whole);
      Rational coefficient = c.pow(whole);
      std::vector<Expr> parts{Expr(coefficient)};
      if (c.num() != 1) parts.push_back(make_normal(ExprKind::power, {Expr(c.num())}, frac));
      if (c.den() != 1) {
        // den^(-frac) = den^(-1) * den^(1-frac)
        parts.emplace_back(Rational(1, c.den()));
        parts.push_back(make_normal(ExprKind::power, {Expr(c.den())}, Rational(1) - frac));
      }
      std::vector<Expr> nonconst;
      Rational k(1);
      for (const auto& p : parts) {
        if (p.kind() == ExprKind::constant) {
          k *= p.value();
        } else {
          nonconst.push_back(p);
        }
      }
      std::sort(nonconst.begin(), nonconst.end(), ExprLess{});
      if (nonconst.size() == 1 && k.is_one()) return nonconst[0];
      if (!k.is_one()) nonconst.insert(nonconst.begin(), Expr(k));
      return make_normal(ExprKind::product, std::move(nonconst));
    }
    case ExprKind::power: {
      if (e.is_integer()) return pow_normal(base.args()[0], base.value() * e);
      return make_normal(ExprKind::power, {base}, e);
    }
    case ExprKind::product: {
      if (!e.is_integer()) {
        // Only a positive constant coefficient can be pulled out safely.
        const auto& a = base.args();
        if (a[0].kind() == ExprKind::constant && !a[0].value().is_negative()) {
          Expr rest = a.size() == 2 ? a[1] : make_normal(ExprKind::product, std::vector<Expr>(a.begin() + 1, a.end()));
          return mul_normal({pow_normal(a[0], e), make_normal(ExprKind::power, {rest}, e)});
        }
        return make_normal(ExprKind::power, {base}, e);
      }
      std::vector<Expr> parts;
      parts.reserve(base.args().size());
      for (const auto& f : base.args()) parts.push_back(pow_normal(f, e));
      return mul_normal(parts);
    }
    case ExprKind::function:
      if (base.func() == Func::exp) return apply_normal(Func::exp, mul_normal({Expr(e), base.args()[0]}));
      return make_normal(ExprKind::power, {base}, e);
    case ExprKind::sum: {
      Rational c = leading_coefficient(base);
      if (c.is_negative() && !e.is_integer()) c = -c;
      if (!c.is_one()) {
        return mul_normal({pow_normal(Expr(c), e), make_normal(ExprKind::power, {scale_sum(base, Rational(1) / c)}, e)});
      }
      return make_normal(ExprKind::power, {base}, e);
    }
    default:
      return make_normal(ExprKind::power, {base}, e);
  }
}

Expr apply_normal(Func f, const Expr& a) {
  if (f == Func::sqrt) return pow_normal(a, Rational(1, 2));
  if (a.kind() == ExprKind::constant) {
    const Rational& c = a.value();
    if (c.is_zero()) {
      switch (f) {
        case Func::exp:
        case Func::cos:
        case Func::cosh:
          return Expr(1);
        case Func::sin:
        case Func::sinh:
        case Func::abs:
          return Expr(0);
        default:
          break;
      }
    }
    if (f == Func::abs) return Expr(c.is_negative() ? -c : c);
  }
  if (f == Func::abs && a.kind() == ExprKind::function && a.func() == Func::abs) return a;
  return make_normal(ExprKind::function, {a}, Rational(), f);
}

}  // namespace

Expr normalize(const Expr& e) {
  if (e.is_normalized()) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) args.push_back(normalize(a));
  switch (e.kind()) {
    case ExprKind::sum:
      return add_normal(args);
    case ExprKind::product:
      return mul_normal(args);
    case ExprKind::power:
      return pow_normal(args[0], e.value());
    case ExprKind::quotient:
      return mul_normal({args[0], pow_normal(args[1], Rational(-1))});
    case ExprKind::negate:
      return mul_normal({Expr(-1), args[0]});
    case ExprKind::function:
      return apply_normal(e.func(), args[0]);
    default:
      return e;
  }
}

Expr operator+(const Expr& a, const Expr& b) { return add_normal({normalize(a), normalize(b)}); }
Expr operator-(const Expr& a, const Expr& b) {
  return add_normal({normalize(a), mul_normal({Expr(-1), normalize(b)})});
}
Expr operator*(const Expr& a, const Expr& b) { return mul_normal({normalize(a), normalize(b)}); }
Expr operator/(const Expr& a, const Expr& b) {
  return mul_normal({normalize(a), pow_normal(normalize(b), Rational(-1))});
}
Expr operator-(const Expr& a) { return mul_normal({Expr(-1), normalize(a)}); }

Expr sum(std::span<const Expr> terms) {
  std::vector<Expr> n;
  n.reserve(terms.size());
  for (const auto& t : terms) n.push_back(normalize(t));
  return add_normal(n);
}

Expr product(std::span<const Expr> factors) {
  std::vector<Expr> n;
  n.reserve(factors.size());
  for (const auto& f : factors) n.push_back(normalize(f));
  return mul_normal(n);
}

Expr pow(const Expr& base, const Rational& exponent) { return pow_normal(normalize(base), exponent); }
Expr apply(Func f, const Expr& argument) { return apply_normal(f, normalize(argument)); }
Expr exp(const Expr& a) { return apply(Func::exp, a); }
Expr sin(const Expr& a) { return apply(Func::sin, a); }
Expr cos(const Expr& a) { return apply(Func::cos, a); }
Expr sinh(const Expr& a) { return apply(Func::sinh, a); }
Expr cosh(const Expr& a) { return apply(Func::cosh, a); }
Expr sqrt(const Expr& a) { return apply(Func::sqrt, a); }
Expr abs(const Expr& a) { return apply(Func::abs, a); }

// ---------------------------------------------------------------------------
// Printing

namespace {

enum Precedence { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

std::string print(const Expr& e, int context);

std::string wrap(const std::string& s, int own, int context) { return own < context ? "(" + s + ")" : s; }

std::string print_constant(const Rational& c, int context) {
  std::string s = c.to_string();
  int own = kAtom;
  if (c.is_negative()) own = kUnary;
  if (!c.is_integer()) own = std::min(own, static_cast<int>(kProduct));
  // A fraction printed inside a product chain stays correct left-to-right
  // only when it comes first, which is the only place coefficients appear.
  return wrap(s, own, context);
}

std::string print_exponent(const Rational& e) {
  if (e.is_integer() && !e.is_negative()) return e.to_string();
  return "(" + e.to_string() + ")";
}

std::string print_product_body(const std::vector<Expr>& factors, std::size_t start) {
  std::string s;
  for (std::size_t i = start; i < factors.size(); ++i) {
    if (i > start) s += "*";
    s += print(factors[i], kPower);
  }
  return s;
}

std::string print(const Expr& e, int context) {
  switch (e.kind()) {
    case ExprKind::constant:
      return print_constant(e.value(), context);
    case ExprKind::coordinate:
    case ExprKind::symbol:
      return e.name();
    case ExprKind::function:
      return std::string(func_name(e.func())) + "(" + print(e.args()[0], 0) + ")";
    case ExprKind::power:
      return print(e.args()[0], kAtom) + "^" + print_exponent(e.value());
    case ExprKind::negate:
      return wrap("-" + print(e.args()[0], kPower), kUnary, context);
    case ExprKind::quotient:
      return wrap(print(e.args()[0], kProduct) + "/" + print(e.args()[1], kPower), kProduct, context);
    case ExprKind::product: {
      const auto& f = e.args();
      if (f[0].kind() == ExprKind::constant && e.is_normalized()) {
        const Rational& c = f[0].value();
        std::string body = print_product_body(f, 1);
        if (c == Rational(-1)) return wrap("-" + body, kUnary, context);
        if (c.is_negative()) return wrap("-" + (-c).to_string() + "*" + body, kUnary, context);
        return wrap(c.to_string() + "*" + body, kProduct, context);
      }
      std::string s;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (i > 0) s += "*";
        s += print(f[i], i == 0 ? kProduct : kPower);
      }
      return wrap(s, kProduct, context);
    }
    case ExprKind::sum: {
      const auto& t = e.args();
      std::string s;
      for (std::size_t i = 0; i < t.size(); ++i) {
        std::string term = print(t[i], kSum);
        if (i > 0) {
          if (!term.empty() && term[0] == '-') {
            s += " - " + term.substr(1);
          } else {
            s += " + " + term;
          }
        } else {
          s += term;
        }
      }
      return wrap(s, kSum, context);
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, 0); }

}  // namespace einmob
