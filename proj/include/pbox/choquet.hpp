#ifndef PBOX_CHOQUET_HPP
#define PBOX_CHOQUET_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "pbox/pbox.hpp"
#include "pbox/preorder.hpp"

namespace pbox {

enum class Monotonicity { kIncreasing, kDecreasing, kGeneral };

/// Lower or upper oscillation of a gamble, as a function of the quotient
/// coordinate z in [0,1].  `sup_value` may be +infinity when the oscillation
/// blows up at z = 1 (upper expectations then need a tail tolerance).
struct Oscillation {
  std::string name;
  std::function<double(double)> f;
  double inf_value = 0.0;
  double sup_value = 0.0;
  Monotonicity monotonicity = Monotonicity::kGeneral;
  /// Optional: t -> z with f(z) = t on [inf_value, sup_value].
  std::function<double(double)> inverse;

  double operator()(double z) const { return f(z); }

  /// Constant oscillation.
  static Oscillation constant(double c);
  /// Piecewise-linear oscillation through knots (z_j, v_j) spanning [0,1];
  /// monotonicity is detected from the knots.
  static Oscillation piecewise_linear(std::string name, std::vector<std::pair<double, double>> knots);
  /// Step oscillation over `values.size()` equal cells of [0,1]:
  /// value[0] on [0, 1/n], value[i] on (i/n, (i+1)/n].
  static Oscillation staircase(std::string name, std::vector<double> values);
};

/// Checks bounds and declared monotonicity on `grid` points and the inverse
/// (if any) on sampled levels.  Throws ValidationError.
void validate(const Oscillation& osc, std::size_t grid = 1001);

struct QuadratureConfig {
  double abs_tol = 1e-4;        // target half-width of the Darboux bracket
  int max_refinements = 24;     // grid doublings after the initial grid
  std::size_t cut_grid = 4096;  // scan resolution for general oscillations
  double bisect_tol = 1e-12;    // endpoint resolution of cut sets
  double tail_tol = 1e-8;       // truncation level for unbounded oscillations
  std::size_t initial_cells = 16;
};

/// Throws ValidationError unless all fields are positive and abs_tol >= 1e-12.
void validate(const QuadratureConfig& cfg);

/// {z in [0,1] : osc(z) >= t}.  Boundary points found by bisection are
/// reported as (last point outside, ...] on the left and [..., last point
/// inside] on the right.
ZEventSet cut_event(const Oscillation& osc, double t, const QuadratureConfig& cfg = {});

struct QuadratureResult {
  double value = 0.0;        // bracket midpoint
  double lower = 0.0;        // lower Darboux bound (plus inf osc)
  double upper = 0.0;        // upper Darboux bound (plus inf osc and tail bound)
  double error_bound = 0.0;  // half the bracket width
  bool converged = true;     // false when the bracket missed abs_tol
  int refinements = 0;
  std::size_t evaluations = 0;
  double truncated_at = 0.0;  // level where an unbounded range was cut, else sup
  double tail_bound = 0.0;    // bound on the integral beyond truncated_at
};

/// inf losc + integral of lower_prob({losc >= t}) over [inf, sup], bracketed
/// by Darboux sums of the non-increasing integrand.
QuadratureResult lower_expectation(const PBox& pbox, const Oscillation& losc, const QuadratureConfig& cfg = {});
/// inf uosc + integral of upper_prob({uosc >= t}).
QuadratureResult upper_expectation(const PBox& pbox, const Oscillation& uosc, const QuadratureConfig& cfg = {});

/// Lower (resp. upper) probability of the cut set {osc >= t}; the Choquet
/// integrands.
double lower_cut_probability(const PBox& pbox, const Oscillation& osc, double t, const QuadratureConfig& cfg = {});
double upper_cut_probability(const PBox& pbox, const Oscillation& osc, double t, const QuadratureConfig& cfg = {});

/// Exact Choquet sum over a finite p-box.
double lower_expectation_finite(const PBox& pbox, std::span<const double> gamble);
double upper_expectation_finite(const PBox& pbox, std::span<const double> gamble);

/// Smallest t with upper_prob({uosc >= t}) <= target, by bisection.
double threshold_solve(const PBox& pbox, const Oscillation& uosc, double target, const QuadratureConfig& cfg = {});

}  // namespace pbox

#endif  // PBOX_CHOQUET_HPP
