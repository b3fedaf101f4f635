#include "pbox/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "pbox/error.hpp"

namespace pbox {
namespace {

constexpr double kRuleTolerance = 1e-12;
constexpr std::size_t kSegmentGrid = 1024;

double step_at(const std::vector<double>& levels, const std::vector<double>& values, double z) {
  auto it = std::upper_bound(levels.begin(), levels.end(), z);
  if (it == levels.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - levels.begin()) - 1];
}

// Visits every point of the grid {0, 1/(g-1), ..., 1}^n.
template <class Visit>
void for_each_grid_point(std::size_t n, std::size_t g, Visit&& visit) {
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> point(n, 0.0);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) point[i] = static_cast<double>(idx[i]) / static_cast<double>(g - 1);
    visit(std::span<const double>(point));
    std::size_t k = 0;
    while (k < n && ++idx[k] == g) idx[k++] = 0;
    if (k == n) return;
  }
}

// Best value of `objective` over [lo, hi]: a uniform grid, the extra candidate
// points inside the segment, and golden-section refinement between the
// neighbours of the best candidate.
template <class Objective>
double optimize_segment(Objective&& objective, double lo, double hi, std::vector<double> candidates, bool maximize) {
  auto better = [maximize](double a, double b) { return maximize ? a > b : a < b; };
  std::vector<double> xs;
  xs.reserve(kSegmentGrid + candidates.size() + 2);
  for (std::size_t i = 0; i < kSegmentGrid; ++i) {
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kSegmentGrid - 1));
  }
  for (double c : candidates) {
    if (c >= lo && c <= hi) xs.push_back(c);
  }
  xs.push_back(lo);
  xs.push_back(hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::size_t best_i = 0;
  double best = objective(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double v = objective(xs[i]);
    if (better(v, best)) {
      best = v;
      best_i = i;
    }
  }
  // Golden-section search on each neighbouring cell of the best point.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto refine = [&](double a, double b) {
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (int iter = 0; iter < 80 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++iter) {
      if (better(fc, fd)) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = objective(d);
      }
      if (better(fc, best)) best = fc;
      if (better(fd, best)) best = fd;
    }
  };
  if (best_i > 0) refine(xs[best_i - 1], xs[best_i]);
  if (best_i + 1 < xs.size()) refine(xs[best_i], xs[best_i + 1]);
  return best;
}

void check_positive(const RealLinePBox& x, const char* which) {
  if (!(x.support_lo() > 0.0)) {
    throw ValidationError(std::string("multiplication and division need a strictly positive support for ") + which);
  }
}

}  // namespace

MarginalSpec MarginalSpec::continuum(std::string name, Cdf lower, Cdf upper) {
  if (lower.is_step() || upper.is_step()) throw ValidationError("continuum marginal cannot use step CDFs");
  PBox check(lower, upper);
  return {ZMap{std::move(name), {}}, std::move(lower), std::move(upper), {}};
}

MarginalSpec MarginalSpec::finite(std::string name, std::vector<double> levels, std::vector<double> lower,
                                  std::vector<double> upper) {
  if (levels.empty()) throw ValidationError("finite marginal needs at least one level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0 && levels[i] <= 1.0)) throw ValidationError("marginal level outside [0,1]");
    if (i && !(levels[i] > levels[i - 1])) throw ValidationError("marginal levels must be strictly increasing");
  }
  PBox check(FiniteQuotientSpace::with_size(levels.size()), Cdf::step(lower), Cdf::step(upper));
  return {ZMap{std::move(name), {}}, Cdf::step(std::move(lower)), Cdf::step(std::move(upper)), std::move(levels)};
}

double MarginalSpec::lower_at(double z) const {
  return is_finite() ? step_at(levels, lower.step_values(), z) : lower.eval(z);
}

double MarginalSpec::upper_at(double z) const {
  return is_finite() ? step_at(levels, upper.step_values(), z) : upper.eval(z);
}

CombinationRule CombinationRule::frechet() {
  return {"frechet",
          [](std::span<const double> a) {
            const double n = static_cast<double>(a.size());
            return std::max(0.0, 1.0 - n + std::accumulate(a.begin(), a.end(), 0.0));
          },
          [](std::span<const double> a) { return *std::min_element(a.begin(), a.end()); }};
}

CombinationRule CombinationRule::independence() {
  auto product = [](std::span<const double> a) {
    return std::accumulate(a.begin(), a.end(), 1.0, std::multiplies<>());
  };
  return {"independence", product, product};
}

void validate(const CombinationRule& rule, std::size_t arity, std::size_t grid) {
  if (!rule.ell || !rule.u) throw ValidationError("combination rule '" + rule.name + "' lacks a combiner");
  if (arity == 0) throw ValidationError("combination rule needs a positive arity");
  const std::size_t g = arity > 6 ? 2 : std::max<std::size_t>(grid, 2);
  const std::vector<double> ones(arity, 1.0);
  if (std::abs(rule.ell(ones) - 1.0) > kRuleTolerance || std::abs(rule.u(ones) - 1.0) > kRuleTolerance) {
    throw ValidationError("combination rule '" + rule.name + "' must map (1,...,1) to 1");
  }
  const double step = 1.0 / static_cast<double>(g - 1);
  for_each_grid_point(arity, g, [&](std::span<const double> p) {
    const double l = rule.ell(p);
    const double u = rule.u(p);
    if (l > u + kRuleTolerance) throw ValidationError("combination rule '" + rule.name + "' has ell > u");
    std::vector<double> q(p.begin(), p.end());
    for (std::size_t i = 0; i < arity; ++i) {
      if (q[i] + step > 1.0 + 1e-15) continue;
      const double keep = q[i];
      q[i] = std::min(1.0, keep + step);
      if (rule.ell(q) < l - kRuleTolerance || rule.u(q) < u - kRuleTolerance) {
        throw ValidationError("combination rule '" + rule.name + "' is not non-decreasing");
      }
      q[i] = keep;
    }
  });
}

std::vector<double> joint_levels(std::span<const MarginalSpec> marginals) {
  std::vector<double> levels;
  for (const auto& m : marginals) levels.insert(levels.end(), m.levels.begin(), m.levels.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

PBox combine(std::span<const MarginalSpec> marginals, const CombinationRule& rule) {
  if (marginals.size() < 2) throw ValidationError("combination needs at least two marginals");
  validate(rule, marginals.size());
  const bool all_finite = std::all_of(marginals.begin(), marginals.end(), [](const auto& m) { return m.is_finite(); });
  const bool any_finite = std::any_of(marginals.begin(), marginals.end(), [](const auto& m) { return m.is_finite(); });
  if (any_finite && !all_finite) throw ValidationError("cannot mix finite and continuum marginals");

  if (all_finite) {
    const auto levels = joint_levels(marginals);
    std::vector<double> lower(levels.size());
    std::vector<double> upper(levels.size());
    std::vector<double> a(marginals.size());
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      for (std::size_t i = 0; i < marginals.size(); ++i) a[i] = marginals[i].lower_at(levels[k]);
      lower[k] = rule.ell(a);
      for (std::size_t i = 0; i < marginals.size(); ++i) a[i] = marginals[i].upper_at(levels[k]);
      upper[k] = rule.u(a);
      char buf[48];
      std::snprintf(buf, sizeof buf, "z=%.12g", levels[k]);
      labels.emplace_back(buf);
    }
    return PBox(FiniteQuotientSpace(std::move(labels)), Cdf::step(std::move(lower)), Cdf::step(std::move(upper)));
  }

  std::vector<MarginalSpec> ms(marginals.begin(), marginals.end());
  auto joint = [ms](const CombinationRule::Combiner& comb, bool lower, bool left) {
    return [ms, comb, lower, left](double z) {
      std::vector<double> a(ms.size());
      for (std::size_t i = 0; i < ms.size(); ++i) {
        const Cdf& f = lower ? ms[i].lower : ms[i].upper;
        a[i] = left ? f.left_limit(z) : f.eval(z);
      }
      return comb(a);
    };
  };
  auto make = [&](const CombinationRule::Combiner& comb, bool lower) {
    const bool cont = std::all_of(ms.begin(), ms.end(),
                                  [lower](const auto& m) { return (lower ? m.lower : m.upper).continuous(); });
    const std::string name = rule.name + (lower ? "-lower" : "-upper");
    if (cont) return Cdf::analytic(name, joint(comb, lower, false));
    return Cdf::analytic_with_jumps(name, joint(comb, lower, false), joint(comb, lower, true));
  };
  return PBox(make(rule.ell, true), make(rule.u, false));
}

double sublevel_box_lower(const PBox& joint, std::span<const double> levels) {
  if (joint.is_finite()) throw ValidationError("sublevel boxes are defined for continuum joint p-boxes");
  if (levels.empty()) throw ValidationError("sublevel box needs at least one level");
  for (double a : levels) {
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("sublevel box level outside [0,1]");
  }
  return joint.lower().eval(*std::min_element(levels.begin(), levels.end()));
}

double product_event_lower(const CombinationRule& rule, std::span<const double> marginal_lower) {
  return rule.ell(marginal_lower);
}

double product_event_upper(const CombinationRule& rule, std::span<const double> marginal_upper) {
  return rule.u(marginal_upper);
}

RealLineCdf RealLineCdf::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ValidationError("real-line CDF needs at least two knots");
  if (knots.front().second != 0.0 || knots.back().second != 1.0) {
    throw ValidationError("real-line CDF knots must run from 0 to 1");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].first < knots[i - 1].first || knots[i].second < knots[i - 1].second) {
      throw ValidationError("real-line CDF knots must be non-decreasing");
    }
  }
  std::vector<double> bps;
  for (const auto& k : knots) bps.push_back(k.first);
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  const double lo = knots.front().first;
  const double hi = knots.back().first;
  auto value = [knots](double x) {
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    if (it == knots.begin()) return 0.0;
    if (it == knots.end()) return 1.0;
    const auto& l = *std::prev(it);
    const auto& r = *it;
    return l.second + (x - l.first) / (r.first - l.first) * (r.second - l.second);
  };
  auto left = [knots](double x) {
    auto it = std::lower_bound(knots.begin(), knots.end(), x,
                               [](const std::pair<double, double>& k, double v) { return k.first < v; });
    if (it == knots.begin()) return 0.0;
    if (it == knots.end()) return 1.0;
    if (it->first == x) return it->second;
    const auto& l = *std::prev(it);
    const auto& r = *it;
    return l.second + (x - l.first) / (r.first - l.first) * (r.second - l.second);
  };
  return from_functions(lo, hi, value, left, std::move(bps));
}

RealLineCdf RealLineCdf::point_mass(double x) {
  return from_functions(x, x, [x](double v) { return v >= x ? 1.0 : 0.0; },
                        [x](double v) { return v > x ? 1.0 : 0.0; }, {x});
}

RealLineCdf RealLineCdf::from_functions(double support_lo, double support_hi, Function value, Function left_limit,
                                        std::vector<double> breakpoints) {
  if (!(support_lo <= support_hi) || !std::isfinite(support_lo) || !std::isfinite(support_hi)) {
    throw ValidationError("real-line CDF needs a bounded support");
  }
  RealLineCdf out;
  out.lo_ = support_lo;
  out.hi_ = support_hi;
  out.value_ = std::move(value);
  out.left_ = std::move(left_limit);
  out.breakpoints_ = std::move(breakpoints);
  std::sort(out.breakpoints_.begin(), out.breakpoints_.end());
  return out;
}

double RealLineCdf::operator()(double x) const {
  if (x < lo_) return 0.0;
  if (x >= hi_) return 1.0;
  return value_(x);
}

double RealLineCdf::left_limit(double x) const {
  if (x <= lo_) return 0.0;
  if (x > hi_) return 1.0;
  return left_(x);
}

RealLineCdf RealLineCdf::negated() const {
  const RealLineCdf self = *this;
  std::vector<double> bps;
  for (double b : breakpoints_) bps.push_back(-b);
  return from_functions(-hi_, -lo_, [self](double x) { return 1.0 - self.left_limit(-x); },
                        [self](double x) { return 1.0 - self(-x); }, std::move(bps));
}

RealLineCdf RealLineCdf::reciprocal() const {
  if (!(lo_ > 0.0)) throw ValidationError("reciprocal needs a strictly positive support");
  const RealLineCdf self = *this;
  std::vector<double> bps;
  for (double b : breakpoints_) bps.push_back(1.0 / b);
  return from_functions(1.0 / hi_, 1.0 / lo_, [self](double x) { return 1.0 - self.left_limit(1.0 / x); },
                        [self](double x) { return 1.0 - self(1.0 / x); }, std::move(bps));
}

RealLineCdf RealLineCdf::logarithm() const {
  if (!(lo_ > 0.0)) throw ValidationError("logarithm needs a strictly positive support");
  const RealLineCdf self = *this;
  std::vector<double> bps;
  for (double b : breakpoints_) bps.push_back(std::log(b));
  return from_functions(std::log(lo_), std::log(hi_), [self](double s) { return self(std::exp(s)); },
                        [self](double s) { return self.left_limit(std::exp(s)); }, std::move(bps));
}

void RealLinePBox::validate() const {
  std::vector<double> xs = lower.breakpoints();
  xs.insert(xs.end(), upper.breakpoints().begin(), upper.breakpoints().end());
  const double lo = support_lo();
  const double hi = support_hi();
  for (int i = 0; i <= 1000; ++i) xs.push_back(lo + (hi - lo) * i / 1000.0);
  for (double x : xs) {
    if (lower(x) > upper(x) + 1e-12 || lower.left_limit(x) > upper.left_limit(x) + 1e-12) {
      throw ValidationError("real-line p-box has lower CDF above upper CDF");
    }
  }
}

double prob_arith_add_lower(const RealLinePBox& x1, const RealLinePBox& x2, double y) {
  const RealLineCdf& f1 = x1.lower;
  const RealLineCdf& f2 = x2.lower;
  const double a1 = f1.support_lo();
  const double b1 = f1.support_hi();
  const double a2 = f2.support_lo();
  const double b2 = f2.support_hi();
  if (y < a1 + a2) return 0.0;
  if (y >= b1 + b2) return 1.0;
  const double lo = std::max(a1, y - b2);
  const double hi = std::min(b1, y - a2);
  std::vector<double> candidates = f1.breakpoints();
  for (double k : f2.breakpoints()) candidates.push_back(y - k);
  auto objective = [&](double s) { return f1(s) + f2(y - s) - 1.0; };
  double best = optimize_segment(objective, lo, hi, std::move(candidates), true);
  // Pairs anchored at a breakpoint, kept on the side x1 + x2 <= y so that
  // rounding of y - k cannot step past an atom.
  auto partner_below = [y](double k) {
    double s = y - k;
    while (s + k > y) s = std::nextafter(s, -std::numeric_limits<double>::infinity());
    return s;
  };
  for (double k : f2.breakpoints()) best = std::max(best, f1(partner_below(k)) + f2(k) - 1.0);
  for (double k : f1.breakpoints()) best = std::max(best, f1(k) + f2(partner_below(k)) - 1.0);
  return std::clamp(best, 0.0, 1.0);
}

double prob_arith_add_upper(const RealLinePBox& x1, const RealLinePBox& x2, double y) {
  const RealLineCdf& f1 = x1.upper;
  const RealLineCdf& f2 = x2.upper;
  const double a1 = f1.support_lo();
  const double b1 = f1.support_hi();
  const double a2 = f2.support_lo();
  const double b2 = f2.support_hi();
  if (y < a1 + a2) return 0.0;
  if (y >= b1 + b2) return 1.0;
  // Infima approached from the left of a jump: x1 -> k- or x2 -> k-.
  double best = std::min(f2(y - a1), f1(y - a2));
  for (double k : f1.breakpoints()) best = std::min(best, f1.left_limit(k) + f2(y - k));
  for (double k : f2.breakpoints()) best = std::min(best, f1(y - k) + f2.left_limit(k));
  const double lo = std::max(a1, y - b2);
  const double hi = std::min(b1, y - a2);
  if (lo <= hi) {
    std::vector<double> candidates = f1.breakpoints();
    for (double k : f2.breakpoints()) candidates.push_back(y - k);
    auto objective = [&](double s) { return f1(s) + f2(y - s); };
    best = std::min(best, optimize_segment(objective, lo, hi, std::move(candidates), false));
  }
  auto partner_above = [y](double k) {
    double s = y - k;
    while (s + k < y) s = std::nextafter(s, std::numeric_limits<double>::infinity());
    return s;
  };
  for (double k : f2.breakpoints()) best = std::min(best, f1(partner_above(k)) + f2(k));
  for (double k : f1.breakpoints()) best = std::min(best, f1(k) + f2(partner_above(k)));
  return std::clamp(best, 0.0, 1.0);
}

RealLinePBox negate(const RealLinePBox& x) { return {x.upper.negated(), x.lower.negated()}; }

RealLinePBox reciprocal(const RealLinePBox& x) { return {x.upper.reciprocal(), x.lower.reciprocal()}; }

RealLinePBox logarithm(const RealLinePBox& x) { return {x.lower.logarithm(), x.upper.logarithm()}; }

std::pair<double, double> prob_arith_transform(ArithOp op, const RealLinePBox& x1, const RealLinePBox& x2, double y) {
  switch (op) {
    case ArithOp::kAdd:
      return {prob_arith_add_lower(x1, x2, y), prob_arith_add_upper(x1, x2, y)};
    case ArithOp::kSubtract: {
      const auto neg = negate(x2);
      return {prob_arith_add_lower(x1, neg, y), prob_arith_add_upper(x1, neg, y)};
    }
    case ArithOp::kMultiply: {
      check_positive(x1, "the first operand");
      check_positive(x2, "the second operand");
      if (y <= 0.0) return {0.0, 0.0};
      const auto l1 = logarithm(x1);
      const auto l2 = logarithm(x2);
      const double s = std::log(y);
      return {prob_arith_add_lower(l1, l2, s), prob_arith_add_upper(l1, l2, s)};
    }
    case ArithOp::kDivide: {
      check_positive(x1, "the first operand");
      check_positive(x2, "the second operand");
      return prob_arith_transform(ArithOp::kMultiply, x1, reciprocal(x2), y);
    }
  }
  throw ValidationError("unknown arithmetic operation");
}

}  // namespace pbox
