#include "einmob/chart.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "einmob/calculus.hpp"
#include "einmob/parse.hpp"

namespace einmob {

Chart::Chart(std::string name, std::vector<std::string> coordinates, std::vector<Interval> box,
             std::vector<Expr> excluded, std::map<std::string, double> constants)
    : name_(std::move(name)),
      coordinates_(std::move(coordinates)),
      box_(std::move(box)),
      excluded_(std::move(excluded)),
      constants_(std::move(constants)) {
  if (coordinates_.empty()) throw std::invalid_argument("chart needs at least one coordinate");
  std::set<std::string> distinct(coordinates_.begin(), coordinates_.end());
  if (distinct.size() != coordinates_.size()) throw std::invalid_argument("chart coordinate names must be distinct");
  if (box_.size() != coordinates_.size()) throw std::invalid_argument("sample box size does not match chart dimension");
  for (const auto& iv : box_) {
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw std::invalid_argument("empty or non-finite sample box interval");
    }
  }
  excluded_program_ = Program(excluded_, coordinates_, constants_);
}

std::vector<std::string> Chart::constant_names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : constants_) out.push_back(k);
  return out;
}

int Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < coordinates_.size(); ++i) {
    if (coordinates_[i] == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown coordinate '" + std::string(name) + "'");
}

Expr Chart::parse(std::string_view text) const { return einmob::parse(text, coordinates_, constant_names()); }

Expr Chart::derivative(const Expr& e, int i) const { return differentiate(e, coordinates_.at(i)); }

Program Chart::compile(const std::vector<Expr>& outputs) const { return Program(outputs, coordinates_, constants_); }

double Chart::evaluate(const Expr& e, const Point& p) const { return compile({e}).evaluate(p)[0]; }

void Chart::check_point(const Point& p) const {
  if (p.size() != coordinates_.size()) throw std::invalid_argument("point has wrong number of coordinates");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < box_[i].lo || p[i] > box_[i].hi) {
      throw std::invalid_argument("point outside the sample box of chart " + name_);
    }
  }
}

Point Chart::center() const {
  Point p(box_.size());
  for (std::size_t i = 0; i < box_.size(); ++i) p[i] = 0.5 * (box_[i].lo + box_[i].hi);
  return p;
}

std::vector<Point> Chart::sample(std::size_t count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 100 * count + 100) throw std::runtime_error("cannot sample chart " + name_ + " off its excluded locus");
    Point p(box_.size());
    for (std::size_t i = 0; i < box_.size(); ++i) p[i] = box_[i].lo + (box_[i].hi - box_[i].lo) * unit(rng);
    if (!excluded_.empty()) {
      auto v = excluded_program_.evaluate(p);
      if (std::any_of(v.begin(), v.end(), [](double x) { return std::fabs(x) < 1e-9; })) continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

Chart Chart::with_box(std::vector<Interval> box) const {
  return Chart(name_, coordinates_, std::move(box), excluded_, constants_);
}

Chart Chart::with_constants(std::map<std::string, double> constants) const {
  return Chart(name_, coordinates_, box_, excluded_, std::move(constants));
}

const char* verdict_name(ZeroVerdict v) {
  switch (v) {
    case ZeroVerdict::proven_zero:
      return "proven-zero";
    case ZeroVerdict::numerically_zero:
      return "numerically-zero";
    case ZeroVerdict::nonzero:
      return "nonzero";
  }
  return "?";
}

ZeroReport is_zero(const Expr& e, const Chart& chart, std::size_t trials, std::uint64_t seed, double tol) {
  if (trials < 1) throw std::invalid_argument("is_zero needs at least one trial");
  ZeroReport report;
  Expr n = normalize(e);
  if (n.is_zero()) return report;
  Program prog = chart.compile({n});
  std::mt19937_64 rng(seed);
  report.verdict = ZeroVerdict::numerically_zero;
  while (report.trials < trials) {
    if (report.rejected > 10 * trials) {
      throw DomainError("no admissible trial point for zero test", to_string(n));
    }
    auto pts = chart.sample(1, rng());
    double scale = 0;
    double v;
    try {
      v = prog.evaluate(pts[0], &scale)[0];
    } catch (const DomainError&) {
      ++report.rejected;
      continue;
    }
    ++report.trials;
    report.scale = std::max(report.scale, scale);
    if (std::fabs(v) > report.max_abs) report.max_abs = std::fabs(v);
    if (std::fabs(v) >= tol * (1.0 + scale)) {
      report.verdict = ZeroVerdict::nonzero;
      report.witness = pts[0];
      return report;
    }
  }
  return report;
}

}  // namespace einmob
