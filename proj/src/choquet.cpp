#include "pbox/choquet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "pbox/error.hpp"

namespace pbox {
namespace {

constexpr double kMonotoneSlack = 1e-9;
constexpr double kInverseTolerance = 1e-10;

// Cell boundaries of an n-cell staircase are the doubles (i+1)/n; the cell of
// z is the first one whose right boundary is >= z.
std::size_t staircase_cell(double z, std::size_t n) {
  std::size_t lo = 0;
  std::size_t hi = n - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (z <= static_cast<double>(mid + 1) / static_cast<double>(n)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

struct Bracket {
  double inside;
  double outside;
};

// Shrinks [inside, outside] (in either order) around the boundary of
// {f >= t} until the points are within tol.
Bracket bisect_boundary(const Oscillation& osc, double t, double inside, double outside, double tol) {
  for (int iter = 0; iter < 200 && std::abs(inside - outside) > tol; ++iter) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (osc.f(mid) >= t) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return {inside, outside};
}

double checked_inverse(const Oscillation& osc, double t) {
  const double z = std::clamp(osc.inverse(t), 0.0, 1.0);
  const double v = osc.f(z);
  if (std::abs(v - t) > 1e-8 * std::max(1.0, std::abs(t))) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "inverse of oscillation '%s' is inconsistent at t=%.12g (f(z)=%.12g)",
                  osc.name.c_str(), t, v);
    throw ValidationError(buf);
  }
  return z;
}

template <class Integrand>
double darboux(Integrand&& g, double a, double b, const QuadratureConfig& cfg, QuadratureResult& out) {
  std::size_t cells = std::max<std::size_t>(cfg.initial_cells, 1);
  std::vector<double> vals(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    vals[i] = g(a + (b - a) * static_cast<double>(i) / static_cast<double>(cells));
  }
  out.evaluations += cells + 1;
  int refinements = 0;
  double lower = 0.0;
  double upper = 0.0;
  while (true) {
    const double h = (b - a) / static_cast<double>(cells);
    double left_sum = 0.0;
    double right_sum = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      if (vals[i + 1] > vals[i] + kMonotoneSlack) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "Choquet integrand increases between t=%.12g and t=%.12g",
                      a + h * static_cast<double>(i), a + h * static_cast<double>(i + 1));
        throw ConsistencyError(buf);
      }
      left_sum += vals[i];
      right_sum += vals[i + 1];
    }
    lower = h * right_sum;
    upper = h * left_sum;
    if (0.5 * (upper - lower) <= cfg.abs_tol) break;
    if (refinements >= cfg.max_refinements) {
      out.converged = false;
      break;
    }
    std::vector<double> finer(2 * cells + 1);
    const double half = h / 2.0;
    for (std::size_t i = 0; i < cells; ++i) {
      finer[2 * i] = vals[i];
      finer[2 * i + 1] = g(a + half * static_cast<double>(2 * i + 1));
    }
    finer[2 * cells] = vals[cells];
    out.evaluations += cells;
    vals = std::move(finer);
    cells *= 2;
    ++refinements;
  }
  out.refinements = refinements;
  out.lower += lower;
  out.upper += upper;
  return 0.5 * (lower + upper);
}

// Finds a level beyond which the integrand stays below cfg.tail_tol.
template <class Integrand>
double find_truncation(Integrand&& g, double a, const QuadratureConfig& cfg, QuadratureResult& out) {
  double step = std::max(1.0, std::abs(a));
  double below = a;
  double above = a + step;
  int iter = 0;
  while (g(above) >= cfg.tail_tol) {
    ++out.evaluations;
    below = above;
    step *= 2.0;
    above = a + step;
    if (++iter > 100) throw ValidationError("integrand does not decay below the tail tolerance");
  }
  while (above - below > 1e-9 * std::max(1.0, std::abs(above))) {
    const double mid = 0.5 * (below + above);
    ++out.evaluations;
    if (g(mid) >= cfg.tail_tol) {
      below = mid;
    } else {
      above = mid;
    }
  }
  return above;
}

// Sums g(t_k) * delta over probes beyond `from` until the integrand is
// negligible or sits on the floor set by the cut-set resolution; g is
// non-increasing so this bounds the remaining integral up to the last probe.
template <class Integrand>
double tail_estimate(Integrand&& g, double from, double delta, const QuadratureConfig& cfg, QuadratureResult& out) {
  const double negligible = cfg.tail_tol * 1e-3;
  double total = 0.0;
  double t = from;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4096; ++k) {
    const double v = g(t);
    ++out.evaluations;
    if (v <= negligible || (v < cfg.tail_tol && v >= previous)) return total;
    total += v * delta;
    previous = v;
    t += delta;
  }
  out.converged = false;
  return total;
}

template <class Integrand>
QuadratureResult choquet_integral(Integrand&& g, const Oscillation& osc, const QuadratureConfig& cfg) {
  validate(cfg);
  if (!std::isfinite(osc.inf_value)) throw ValidationError("oscillation must be bounded below");
  QuadratureResult out;
  const double a = osc.inf_value;
  out.lower = a;
  out.upper = a;
  if (osc.sup_value <= a) {
    out.value = a;
    out.truncated_at = a;
    return out;
  }
  double b = osc.sup_value;
  if (!std::isfinite(b)) {
    if (!(cfg.tail_tol > 0.0)) throw ValidationError("unbounded oscillation needs a tail tolerance");
    b = find_truncation(g, a, cfg, out);
    darboux(g, a, b, cfg, out);
    out.tail_bound = tail_estimate(g, b, (b - a) / 16.0, cfg, out);
    out.upper += out.tail_bound;
  } else {
    darboux(g, a, b, cfg, out);
  }
  out.truncated_at = b;
  out.value = 0.5 * (out.lower + out.upper);
  out.error_bound = 0.5 * (out.upper - out.lower);
  if (out.error_bound > cfg.abs_tol) out.converged = false;
  return out;
}

}  // namespace

Oscillation Oscillation::constant(double c) {
  return {"constant", [c](double) { return c; }, c, c, Monotonicity::kGeneral, {}};
}

Oscillation Oscillation::piecewise_linear(std::string name, std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2 || knots.front().first != 0.0 || knots.back().first != 1.0) {
    throw ValidationError("piecewise-linear oscillation knots must span [0,1]");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first > knots[i - 1].first)) {
      throw ValidationError("piecewise-linear oscillation knots must be strictly increasing in z");
    }
  }
  double lo = knots.front().second;
  double hi = lo;
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    lo = std::min(lo, knots[i].second);
    hi = std::max(hi, knots[i].second);
    if (knots[i].second < knots[i - 1].second) up = false;
    if (knots[i].second > knots[i - 1].second) down = false;
  }
  Monotonicity m = Monotonicity::kGeneral;
  if (up && !down) m = Monotonicity::kIncreasing;
  if (down && !up) m = Monotonicity::kDecreasing;
  auto f = [knots](double z) {
    auto it = std::upper_bound(knots.begin(), knots.end(), z,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    if (it == knots.begin()) return knots.front().second;
    if (it == knots.end()) return knots.back().second;
    const auto& r = *it;
    const auto& l = *std::prev(it);
    return l.second + (z - l.first) / (r.first - l.first) * (r.second - l.second);
  };
  return {std::move(name), f, lo, hi, m, {}};
}

Oscillation Oscillation::staircase(std::string name, std::vector<double> values) {
  if (values.empty()) throw ValidationError("staircase oscillation needs at least one value");
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  auto f = [values](double z) { return values[staircase_cell(z, values.size())]; };
  const bool up = std::is_sorted(values.begin(), values.end());
  const bool down = std::is_sorted(values.rbegin(), values.rend());
  Monotonicity m = Monotonicity::kGeneral;
  if (up && !down) m = Monotonicity::kIncreasing;
  if (down && !up) m = Monotonicity::kDecreasing;
  return {std::move(name), f, lo, hi, m, {}};
}

void validate(const Oscillation& osc, std::size_t grid) {
  if (!osc.f) throw ValidationError("oscillation '" + osc.name + "' has no function");
  if (!(osc.inf_value <= osc.sup_value)) throw ValidationError("oscillation '" + osc.name + "' has inf > sup");
  const std::size_t n = std::max<std::size_t>(grid, 2);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = static_cast<double>(i) / static_cast<double>(n - 1);
    const double v = osc.f(z);
    if (std::isnan(v) || v < osc.inf_value || v > osc.sup_value) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "oscillation '%s' leaves its declared range at z=%.12g", osc.name.c_str(), z);
      throw ValidationError(buf);
    }
    if (i > 0) {
      const bool bad = (osc.monotonicity == Monotonicity::kIncreasing && v < prev) ||
                       (osc.monotonicity == Monotonicity::kDecreasing && v > prev);
      if (bad) throw ValidationError("oscillation '" + osc.name + "' violates its declared monotonicity");
    }
    prev = v;
  }
  if (osc.inverse) {
    if (osc.monotonicity == Monotonicity::kGeneral) {
      throw ValidationError("an inverse requires a monotone oscillation");
    }
    const double top = std::isfinite(osc.sup_value) ? osc.sup_value : osc.f(0.999);
    const double bottom = std::max(osc.inf_value, std::min(osc.f(0.0), osc.f(1.0)));
    for (int k = 0; k <= 64; ++k) {
      const double t = bottom + (top - bottom) * k / 64.0;
      const double z = osc.inverse(t);
      if (z < 0.0 || z > 1.0) continue;
      if (std::abs(osc.f(z) - t) > kInverseTolerance * std::max(1.0, std::abs(t))) {
        throw ValidationError("inverse of oscillation '" + osc.name + "' does not invert it");
      }
    }
  }
}

void validate(const QuadratureConfig& cfg) {
  if (!(cfg.abs_tol >= 1e-12)) throw ValidationError("abs_tol must be at least 1e-12");
  if (cfg.max_refinements < 0) throw ValidationError("max_refinements must be non-negative");
  if (cfg.cut_grid < 2) throw ValidationError("cut_grid must be at least 2");
  if (!(cfg.bisect_tol > 0.0)) throw ValidationError("bisect_tol must be positive");
  if (cfg.tail_tol < 0.0) throw ValidationError("tail_tol must be non-negative");
  if (cfg.initial_cells < 1) throw ValidationError("initial_cells must be positive");
}

ZEventSet cut_event(const Oscillation& osc, double t, const QuadratureConfig& cfg) {
  if (t <= osc.inf_value) return normalize({ZInterval::closed(0.0, 1.0)});
  if (t > osc.sup_value) return {};
  switch (osc.monotonicity) {
    case Monotonicity::kDecreasing: {
      if (osc.f(0.0) < t) return {};
      if (osc.f(1.0) >= t) return normalize({ZInterval::closed(0.0, 1.0)});
      if (osc.inverse) return normalize({ZInterval::closed(0.0, checked_inverse(osc, t))});
      const auto b = bisect_boundary(osc, t, 0.0, 1.0, cfg.bisect_tol);
      return normalize({ZInterval::closed(0.0, b.inside)});
    }
    case Monotonicity::kIncreasing: {
      if (osc.f(1.0) < t) return {};
      if (osc.f(0.0) >= t) return normalize({ZInterval::closed(0.0, 1.0)});
      if (osc.inverse) return normalize({ZInterval::closed(checked_inverse(osc, t), 1.0)});
      const auto b = bisect_boundary(osc, t, 1.0, 0.0, cfg.bisect_tol);
      return normalize({ZInterval::left_open(b.outside, 1.0)});
    }
    case Monotonicity::kGeneral:
      break;
  }
  const std::size_t n = cfg.cut_grid;
  auto at = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n - 1); };
  std::vector<ZInterval> pieces;
  bool inside = osc.f(0.0) >= t;
  ZInterval open_piece{0.0, 0.0, false, false};
  for (std::size_t i = 1; i < n; ++i) {
    const bool now = osc.f(at(i)) >= t;
    if (now == inside) continue;
    if (now) {
      const auto b = bisect_boundary(osc, t, at(i), at(i - 1), cfg.bisect_tol);
      open_piece = {b.outside, b.outside, true, false};
    } else {
      const auto b = bisect_boundary(osc, t, at(i - 1), at(i), cfg.bisect_tol);
      open_piece.hi = b.inside;
      if (open_piece.hi >= open_piece.lo) pieces.push_back(open_piece);
    }
    inside = now;
  }
  if (inside) {
    open_piece.hi = 1.0;
    pieces.push_back(open_piece);
  }
  return normalize(std::move(pieces));
}

double lower_cut_probability(const PBox& pbox, const Oscillation& osc, double t, const QuadratureConfig& cfg) {
  return lower_prob_event(pbox, cut_event(osc, t, cfg));
}

double upper_cut_probability(const PBox& pbox, const Oscillation& osc, double t, const QuadratureConfig& cfg) {
  return upper_prob_event(pbox, complement_z(cut_event(osc, t, cfg)));
}

QuadratureResult lower_expectation(const PBox& pbox, const Oscillation& losc, const QuadratureConfig& cfg) {
  if (pbox.is_finite()) throw ValidationError("use lower_expectation_finite for finite p-boxes");
  return choquet_integral([&](double t) { return lower_cut_probability(pbox, losc, t, cfg); }, losc, cfg);
}

QuadratureResult upper_expectation(const PBox& pbox, const Oscillation& uosc, const QuadratureConfig& cfg) {
  if (pbox.is_finite()) throw ValidationError("use upper_expectation_finite for finite p-boxes");
  return choquet_integral([&](double t) { return upper_cut_probability(pbox, uosc, t, cfg); }, uosc, cfg);
}

double lower_expectation_finite(const PBox& pbox, std::span<const double> gamble) {
  const auto& space = pbox.finite_space();
  if (gamble.size() != space.size()) throw ValidationError("gamble length does not match the number of classes");
  for (double g : gamble) {
    if (!std::isfinite(g)) throw ValidationError("gamble values must be finite");
  }
  std::vector<double> levels(gamble.begin(), gamble.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double total = levels.front();
  for (std::size_t j = 1; j < levels.size(); ++j) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < gamble.size(); ++i) {
      if (gamble[i] >= levels[j]) members.push_back(i);
    }
    total += (levels[j] - levels[j - 1]) * lower_prob_event(pbox, ClassSubset(space, std::move(members)));
  }
  return total;
}

double upper_expectation_finite(const PBox& pbox, std::span<const double> gamble) {
  std::vector<double> negated(gamble.begin(), gamble.end());
  for (auto& g : negated) g = -g;
  return -lower_expectation_finite(pbox, negated);
}

double threshold_solve(const PBox& pbox, const Oscillation& uosc, double target, const QuadratureConfig& cfg) {
  if (!(target > 0.0 && target <= 1.0)) throw ValidationError("threshold target must lie in (0,1]");
  auto risk = [&](double t) { return upper_cut_probability(pbox, uosc, t, cfg); };
  double lo = uosc.inf_value;
  if (risk(lo) <= target) return lo;
  double hi;
  if (std::isfinite(uosc.sup_value)) {
    hi = uosc.sup_value;
    if (risk(hi) > target) return hi;
  } else {
    double step = std::max(1.0, std::abs(lo));
    hi = lo + step;
    int iter = 0;
    while (risk(hi) > target) {
      lo = hi;
      step *= 2.0;
      hi = uosc.inf_value + step;
      if (++iter > 100) throw ValidationError("threshold target unreachable on the oscillation range");
    }
  }
  while (hi - lo > cfg.bisect_tol * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (risk(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace pbox
