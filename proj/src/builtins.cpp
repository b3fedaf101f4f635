#include "pbox/builtins.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "pbox/error.hpp"

namespace pbox::builtins {
namespace {

Cdf vacuous_upper() {
  return Cdf::analytic("vacuous", [](double) { return 1.0; });
}

}  // namespace

double oscillator_lower_osc(double z) { return (2.0 - z) / (2.0 * std::sqrt(1.0 + z / 2.0)); }

double oscillator_upper_osc(double z) { return (2.0 + z) / (2.0 * std::sqrt(1.0 - z / 2.0)); }

double oscillator_z_of_t(double t) { return 2.0 - t * (-t + std::sqrt(t * t + 8.0)); }

Oscillation oscillator_lower() {
  Oscillation osc;
  osc.name = "losc";
  osc.f = oscillator_lower_osc;
  osc.inf_value = 1.0 / std::sqrt(6.0);
  osc.sup_value = 1.0;
  osc.monotonicity = Monotonicity::kDecreasing;
  osc.inverse = [](double t) { return std::clamp(oscillator_z_of_t(t), 0.0, 1.0); };
  return osc;
}

Oscillation oscillator_upper() {
  Oscillation osc;
  osc.name = "uosc";
  osc.f = oscillator_upper_osc;
  osc.inf_value = 1.0;
  osc.sup_value = 3.0 / std::sqrt(2.0);
  osc.monotonicity = Monotonicity::kIncreasing;
  osc.inverse = [](double t) { return std::clamp(-oscillator_z_of_t(t), 0.0, 1.0); };
  return osc;
}

std::vector<MarginalSpec> oscillator_marginals() {
  const Cdf uniform = Cdf::piecewise_linear({{0.0, 0.0}, {1.0, 1.0}});
  return {MarginalSpec::continuum("c", uniform, vacuous_upper()),
          MarginalSpec::continuum("k", uniform, vacuous_upper())};
}

PBox oscillator_pbox() { return combine(oscillator_marginals(), CombinationRule::independence()); }

double dike_o(double z) {
  if (z >= 1.0) return std::numeric_limits<double>::infinity();
  const double q = kDikeMu - kDikeBeta * std::log(-std::log((1.0 + z) / 2.0));
  if (!(q > 0.0)) return 0.0;
  const double k = 30.0 - 15.0 * z;
  const double slope = std::sqrt((5.0 - 2.0 * z) / kDikeLength);
  return std::pow(q / (k * slope * kDikeWidth), 0.6);
}

Oscillation dike_lower() {
  Oscillation osc;
  osc.name = "losc";
  osc.f = [](double z) { return dike_o(-z); };
  osc.inf_value = 0.0;
  osc.sup_value = dike_o(0.0);
  osc.monotonicity = Monotonicity::kDecreasing;
  return osc;
}

Oscillation dike_upper() {
  Oscillation osc;
  osc.name = "uosc";
  osc.f = dike_o;
  osc.inf_value = dike_o(0.0);
  osc.sup_value = std::numeric_limits<double>::infinity();
  osc.monotonicity = Monotonicity::kIncreasing;
  return osc;
}

std::vector<MarginalSpec> dike_marginals() {
  const Cdf uniform = Cdf::piecewise_linear({{0.0, 0.0}, {1.0, 1.0}});
  const Cdf quadratic = Cdf::analytic("1-(1-z)^2", [](double z) { return 1.0 - (1.0 - z) * (1.0 - z); });
  return {MarginalSpec::continuum("r", uniform, vacuous_upper()),
          MarginalSpec::continuum("k", quadratic, vacuous_upper()),
          MarginalSpec::continuum("u", quadratic, vacuous_upper()),
          MarginalSpec::continuum("d", quadratic, vacuous_upper())};
}

PBox dike_pbox() { return combine(dike_marginals(), CombinationRule::frechet()); }

ZEventSet diagonal_rectangle_interior(double a, double b, double c, double d) {
  if (!(0.0 <= a && a <= b && b <= 1.0 && 0.0 <= c && c <= d && d <= 1.0)) {
    throw ValidationError("rectangle must satisfy 0 <= a <= b <= 1 and 0 <= c <= d <= 1");
  }
  const double low = std::max(a, c);
  const double high = std::min(b, d);
  if (low == 0.0 && high == 1.0) return normalize({ZInterval::closed(0.0, 1.0)});
  if (low == 0.0) return normalize({ZInterval::closed(0.0, high / 2.0)});
  if (high == 1.0) return normalize({ZInterval::closed((1.0 + low) / 2.0, 1.0)});
  return {};
}

void check_constants() {
  assert(kOscillatorC / (2.0 * std::sqrt(kOscillatorK)) == 1.0);
  assert(std::abs(oscillator_lower_osc(1.0) - 1.0 / std::sqrt(6.0)) < 1e-15);
  assert(std::abs(oscillator_upper_osc(1.0) - 3.0 / std::sqrt(2.0)) < 1e-15);
  assert(kDikeMu == 1335.0 && kDikeBeta == 716.0 && kDikeWidth == 300.0 && kDikeLength == 6400.0);
  assert(std::abs(dike_o(0.0) - 3.0316) < 1e-3);
}

}  // namespace pbox::builtins
