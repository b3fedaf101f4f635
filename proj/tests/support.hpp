#ifndef PBOX_TESTS_SUPPORT_HPP
#define PBOX_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "pbox/choquet.hpp"
#include "pbox/multivariate.hpp"
#include "pbox/pbox.hpp"

namespace testsupport {

/// Knots of a continuous piecewise-linear CDF pair on [lo, hi], lower <= upper.
struct LinearPair {
  std::vector<std::pair<double, double>> lower;
  std::vector<std::pair<double, double>> upper;
  pbox::RealLinePBox box() const {
    return {pbox::RealLineCdf::piecewise_linear(lower), pbox::RealLineCdf::piecewise_linear(upper)};
  }
};

inline LinearPair random_linear_pair(std::mt19937_64& rng, double lo, double hi, int knots) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(knots - 2), a(knots - 2), b(knots - 2);
  for (auto& x : xs) x = lo + (hi - lo) * u(rng);
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = u(rng);
  std::sort(xs.begin(), xs.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  LinearPair p;
  p.lower.push_back({lo, 0.0});
  p.upper.push_back({lo, 0.0});
  for (int k = 0; k < knots - 2; ++k) {
    p.lower.push_back({xs[k], std::min(a[k], b[k])});
    p.upper.push_back({xs[k], std::max(a[k], b[k])});
  }
  p.lower.push_back({hi, 1.0});
  p.upper.push_back({hi, 1.0});
  return p;
}

/// Direct evaluation of the dependency bounds of X1 op X2 at y by scanning x1
/// over 1e5 uniform points of X1's support plus the points where either
/// marginal has a knot.  No variable transformation is involved.
inline std::pair<double, double> fine_grid_bounds(pbox::ArithOp op, const LinearPair& p1, const LinearPair& p2,
                                                  double y, int points = 100000) {
  const auto b1 = p1.box();
  const auto b2 = p2.box();
  const double lo = b1.support_lo(), hi = b1.support_hi();
  std::vector<double> xs;
  xs.reserve(points + 64);
  for (int i = 0; i < points; ++i) xs.push_back(lo + (hi - lo) * i / (points - 1));
  auto add_knot = [&](double x) {
    if (std::isfinite(x) && x >= lo && x <= hi) xs.push_back(x);
  };
  for (const auto& k : p1.lower) add_knot(k.first);
  for (const auto& k : p1.upper) add_knot(k.first);
  // x2 as a function of x1 on the constraint set
  auto partner = [&](double x1) {
    switch (op) {
      case pbox::ArithOp::kAdd: return y - x1;
      case pbox::ArithOp::kSubtract: return x1 - y;
      case pbox::ArithOp::kMultiply: return y / x1;
      case pbox::ArithOp::kDivide: return x1 / y;
    }
    return 0.0;
  };
  auto inverse_partner = [&](double x2) {
    switch (op) {
      case pbox::ArithOp::kAdd: return y - x2;
      case pbox::ArithOp::kSubtract: return x2 + y;
      case pbox::ArithOp::kMultiply: return y / x2;
      case pbox::ArithOp::kDivide: return x2 * y;
    }
    return 0.0;
  };
  for (const auto& k : p2.lower) add_knot(inverse_partner(k.first));
  for (const auto& k : p2.upper) add_knot(inverse_partner(k.first));
  const bool reversed = op == pbox::ArithOp::kSubtract || op == pbox::ArithOp::kDivide;
  double best_lower = 0.0, best_upper = 1.0;
  for (double x1 : xs) {
    const double x2 = partner(x1);
    double l, u;
    if (!reversed) {
      // P(X1 <= x1, X2 <= x2) bounds
      l = b1.lower(x1) + b2.lower(x2) - 1.0;
      u = b1.upper(x1) + b2.upper(x2);
    } else {
      // X2 >= x2 is the second event
      l = b1.lower(x1) - b2.upper.left_limit(x2);
      u = b1.upper(x1) + 1.0 - b2.lower.left_limit(x2);
    }
    best_lower = std::max(best_lower, l);
    best_upper = std::min(best_upper, u);
  }
  return {std::clamp(best_lower, 0.0, 1.0), std::clamp(best_upper, 0.0, 1.0)};
}

/// A random continuum p-box with analytic bounds z^a <= F <= z^b (a >= b) and
/// a random monotone or wavy oscillation.
struct AnalyticCase {
  pbox::PBox box;
  pbox::Oscillation osc;
  bool lower_side;
};

inline AnalyticCase random_analytic_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double b = 0.3 + 1.5 * u(rng);
  const double a = b + 2.0 * u(rng);
  pbox::PBox box(pbox::Cdf::analytic("z^a", [a](double z) { return std::pow(z, a); }),
                 pbox::Cdf::analytic("z^b", [b](double z) { return std::pow(z, b); }));
  pbox::Oscillation osc;
  const double scale = 0.5 + 3.0 * u(rng);
  const double shift = -1.0 + 2.0 * u(rng);
  const int shape = static_cast<int>(u(rng) * 3);
  if (shape == 0) {
    const double e = 0.5 + 2.0 * u(rng);
    osc.name = "power";
    osc.f = [=](double z) { return shift + scale * std::pow(z, e); };
    osc.inf_value = shift;
    osc.sup_value = shift + scale;
    osc.monotonicity = pbox::Monotonicity::kIncreasing;
  } else if (shape == 1) {
    const double k = 0.5 + 3.0 * u(rng);
    osc.name = "decay";
    osc.f = [=](double z) { return shift + scale * std::exp(-k * z); };
    osc.inf_value = shift + scale * std::exp(-k);
    osc.sup_value = shift + scale;
    osc.monotonicity = pbox::Monotonicity::kDecreasing;
  } else {
    const double w = 2.0 + 8.0 * u(rng);
    osc.name = "wave";
    osc.f = [=](double z) { return shift + scale * (z + 0.3 * std::sin(w * z)); };
    osc.inf_value = shift - 0.3 * scale;
    osc.sup_value = shift + 1.3 * scale;
    osc.monotonicity = pbox::Monotonicity::kGeneral;
  }
  return {box, osc, u(rng) < 0.5};
}

}  // namespace testsupport

#endif  // PBOX_TESTS_SUPPORT_HPP
