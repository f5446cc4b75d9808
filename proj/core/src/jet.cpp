#include "einmob/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace einmob {

std::shared_ptr<const JetSpace> JetSpace::get(int nvars, int max_order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{nvars, max_order}];
  if (!slot) slot = std::make_shared<const JetSpace>(nvars, max_order);
  return slot;
}

std::uint64_t JetSpace::encode(const std::vector<int>& alpha) const {
  std::uint64_t key = 0;
  for (int a : alpha) key = key * static_cast<std::uint64_t>(max_order_ + 1) + static_cast<std::uint64_t>(a);
  return key;
}

JetSpace::JetSpace(int nvars, int max_order) : nvars_(nvars), max_order_(max_order) {
  if (nvars < 1 || max_order < 0) throw std::invalid_argument("invalid jet space");
  // Enumerate multi-indices degree by degree.
  std::vector<int> alpha(nvars, 0);
  degree_end_.assign(max_order + 1, 0);
  for (int d = 0; d <= max_order; ++d) {
    // All compositions of d into nvars parts, in reverse-lex order.
    std::vector<int> cur(nvars, 0);
    auto rec = [&](auto& self, int var, int left) -> void {
      if (var == nvars - 1) {
        cur[var] = left;
        exps_.push_back(cur);
        degree_.push_back(d);
        return;
      }
      for (int k = left; k >= 0; --k) {
        cur[var] = k;
        self(self, var + 1, left - k);
      }
      cur[var] = 0;
    };
    rec(rec, 0, d);
    degree_end_[d] = exps_.size();
  }
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed;
  keyed.reserve(exps_.size());
  for (std::size_t i = 0; i < exps_.size(); ++i) keyed.emplace_back(encode(exps_[i]), static_cast<std::uint32_t>(i));
  std::sort(keyed.begin(), keyed.end());
  for (auto& [k, i] : keyed) {
    keys_.push_back(k);
    key_index_.push_back(i);
  }

  // Multiplication table grouped by output degree.
  std::vector<std::vector<Triple>> by_degree(max_order + 1);
  std::vector<int> sum(nvars);
  for (std::size_t a = 0; a < exps_.size(); ++a) {
    for (std::size_t b = 0; b < exps_.size(); ++b) {
      int d = degree_[a] + degree_[b];
      if (d > max_order) {
        if (degree_[b] > max_order - degree_[a]) break;
        continue;
      }
      for (int v = 0; v < nvars; ++v) sum[v] = exps_[a][v] + exps_[b][v];
      auto out = static_cast<std::uint32_t>(index_of(sum));
      by_degree[d].push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), out});
    }
  }
  triple_end_.assign(max_order + 1, 0);
  for (int d = 0; d <= max_order; ++d) {
    triples_.insert(triples_.end(), by_degree[d].begin(), by_degree[d].end());
    triple_end_[d] = triples_.size();
  }

  up_.assign(nvars, std::vector<std::uint32_t>(max_order > 0 ? degree_end_[max_order - 1] : 0));
  for (int v = 0; v < nvars; ++v) {
    for (std::size_t i = 0; i < up_[v].size(); ++i) {
      std::vector<int> beta = exps_[i];
      ++beta[v];
      up_[v][i] = static_cast<std::uint32_t>(index_of(beta));
    }
  }
}

std::int64_t JetSpace::index_of(const std::vector<int>& alpha) const {
  int d = std::accumulate(alpha.begin(), alpha.end(), 0);
  if (d > max_order_) return -1;
  auto key = encode(alpha);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  return key_index_[static_cast<std::size_t>(it - keys_.begin())];
}

Jet Jet::constant(const JetSpace* space, int order, double v) {
  Jet j(space, order);
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(const JetSpace* space, int order, int var, double x0) {
  Jet j(space, order);
  j.c_[0] = x0;
  if (order >= 1) j.c_[1 + var] = 1.0;
  return j;
}

bool Jet::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

Jet Jet::derivative(int var) const {
  if (order_ < 1) throw std::logic_error("derivative of an order-0 jet");
  Jet out(space_, order_ - 1);
  for (std::size_t i = 0; i < out.c_.size(); ++i) {
    std::uint32_t src = space_->shift_up(var, i);
    out.c_[i] = static_cast<double>(space_->exponents(i)[var] + 1) * c_[src];
  }
  return out;
}

double Jet::partial(const std::vector<int>& alpha) const {
  std::int64_t i = space_->index_of(alpha);
  if (i < 0 || static_cast<std::size_t>(i) >= c_.size()) throw std::out_of_range("jet order too low for partial");
  double f = 1.0;
  for (int a : alpha) {
    for (int k = 2; k <= a; ++k) f *= k;
  }
  return c_[static_cast<std::size_t>(i)] * f;
}

Jet Jet::truncated(int order) const {
  if (order > order_) throw std::logic_error("cannot raise jet order");
  Jet out(space_, order);
  std::copy_n(c_.begin(), out.c_.size(), out.c_.begin());
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

void Jet::add_product(const Jet& a, const Jet& b, double scale) {
  int order = std::min({order_, a.order_, b.order_});
  if (order < order_) *this = truncated(order);
  const auto& t = space_->triples();
  std::size_t end = space_->triples_end(order);
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  double* out = c_.data();
  if (scale == 1.0) {
    for (std::size_t k = 0; k < end; ++k) out[t[k].out] += pa[t[k].a] * pb[t[k].b];
  } else {
    for (std::size_t k = 0; k < end; ++k) out[t[k].out] += scale * pa[t[k].a] * pb[t[k].b];
  }
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.space_, std::min(a.order_, b.order_));
  out.add_product(a, b);
  return out;
}

Jet compose(const Jet& u, const std::vector<double>& taylor) {
  int order = u.order();
  Jet delta = u;
  delta.coefficients()[0] = 0.0;
  Jet result = Jet::constant(u.space(), order, taylor[0]);
  Jet term = Jet::constant(u.space(), order, 1.0);
  for (int k = 1; k <= order; ++k) {
    term = term * delta;
    if (taylor[k] != 0.0) {
      for (std::size_t i = 0; i < result.coefficients().size(); ++i) {
        result.coefficients()[i] += taylor[k] * term.coefficients()[i];
      }
    }
  }
  return result;
}

Jet reciprocal(const Jet& u) { return power(u, -1.0, true); }

Jet power(const Jet& u, double e, bool integer_exponent) {
  double a = u.value();
  int order = u.order();
  std::vector<double> taylor(order + 1, 0.0);
  if (a == 0.0) {
    if (!integer_exponent || e < 0) throw std::domain_error("power of zero with non-natural exponent");
    auto n = static_cast<int>(e);
    // (delta)^n
    if (n <= order) taylor[n] = 1.0;
    return compose(u, taylor);
  }
  double base = std::pow(std::fabs(a), e);
  if (a < 0) {
    if (integer_exponent) {
      if (static_cast<long long>(std::llround(e)) % 2 != 0) base = -base;
    } else {
      throw std::domain_error("non-integer power of negative jet base");
    }
  }
  // binom(e,k) a^(e-k)
  double coeff = base;
  for (int k = 0; k <= order; ++k) {
    taylor[k] = coeff;
    coeff *= (e - k) / (k + 1) / a;
  }
  return compose(u, taylor);
}

Jet exp(const Jet& u) {
  double v = std::exp(u.value());
  std::vector<double> t(u.order() + 1);
  double f = 1.0;
  for (int k = 0; k <= u.order(); ++k) {
    t[k] = v / f;
    f *= (k + 1);
  }
  return compose(u, t);
}

namespace {

// Taylor coefficients of sin/cos (hyperbolic or not) at a.
std::vector<double> trig_taylor(double a, int order, bool is_sin, bool hyperbolic) {
  double s = hyperbolic ? std::sinh(a) : std::sin(a);
  double c = hyperbolic ? std::cosh(a) : std::cos(a);
  // derivatives cycle
  std::vector<double> t(order + 1);
  double f = 1.0;
  for (int k = 0; k <= order; ++k) {
    double d;
    if (hyperbolic) {
      d = (k % 2 == 0) == is_sin ? s : c;
    } else {
      int phase = (k + (is_sin ? 0 : 1)) % 4;
      static constexpr int sign_sin[4] = {1, 1, -1, -1};
      // phase 0: sin, 1: cos, 2: -sin, 3: -cos
      d = (phase % 2 == 0 ? s : c) * sign_sin[phase];
    }
    t[k] = d / f;
    f *= (k + 1);
  }
  return t;
}

}  // namespace

Jet sin(const Jet& u) { return compose(u, trig_taylor(u.value(), u.order(), true, false)); }
Jet cos(const Jet& u) { return compose(u, trig_taylor(u.value(), u.order(), false, false)); }
Jet sinh(const Jet& u) { return compose(u, trig_taylor(u.value(), u.order(), true, true)); }
Jet cosh(const Jet& u) { return compose(u, trig_taylor(u.value(), u.order(), false, true)); }

}  // namespace einmob
