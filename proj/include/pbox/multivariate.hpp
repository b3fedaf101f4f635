#ifndef PBOX_MULTIVARIATE_HPP
#define PBOX_MULTIVARIATE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbox/cdf.hpp"
#include "pbox/pbox.hpp"

namespace pbox {

/// Surjective mapping Z_i from a factor space onto [0,1].  Only documents the
/// modelling choice; the marginal CDFs are already expressed in z.
struct ZMap {
  std::string name;
  std::function<double(double)> to_z;  // optional, for real-valued factors
};

/// Marginal p-box of one factor, in its own z-coordinate.
///
/// Continuum marginals carry CDFs on [0,1].  Finite marginals carry the sorted
/// z-levels of their classes together with step CDFs over those classes.
struct MarginalSpec {
  ZMap z_map;
  Cdf lower;
  Cdf upper;
  std::vector<double> levels;  // empty for continuum marginals

  static MarginalSpec continuum(std::string name, Cdf lower, Cdf upper);
  static MarginalSpec finite(std::string name, std::vector<double> levels, std::vector<double> lower,
                             std::vector<double> upper);

  bool is_finite() const { return !levels.empty(); }
  /// CDF values at an arbitrary z in [0,1]; finite marginals are evaluated at
  /// their largest level <= z (0 below the first level).
  double lower_at(double z) const;
  double upper_at(double z) const;
};

/// Rule of combination acting on product events through its lower and upper
/// combiners.
struct CombinationRule {
  using Combiner = std::function<double(std::span<const double>)>;
  std::string name;
  Combiner ell;
  Combiner u;

  /// max{0, 1 - n + sum a_i} and min a_i: unknown dependence.
  static CombinationRule frechet();
  /// prod a_i for both: epistemic independence on product events.
  static CombinationRule independence();
};

/// Checks monotonicity, normalization and ell <= u on a grid of the given
/// arity.  Throws ValidationError.
void validate(const CombinationRule& rule, std::size_t arity, std::size_t grid = 5);

/// Joint p-box on the preorder induced by Z = max_i Z_i:
/// lower(z) = ell(lower_i(z)), upper(z) = u(upper_i(z)).  All-finite
/// marginals give a finite joint p-box over the union of their levels.
PBox combine(std::span<const MarginalSpec> marginals, const CombinationRule& rule);

/// Sorted union of the z-levels of finite marginals.
std::vector<double> joint_levels(std::span<const MarginalSpec> marginals);

/// Lower probability assigned by a joint continuum p-box to the box
/// prod_i Z_i^{-1}([0, a_i]): its largest sublevel set is Z^{-1}([0, min a_i]).
double sublevel_box_lower(const PBox& joint, std::span<const double> levels);

/// Value of the combined model on a product event, given the marginal lower
/// (resp. upper) probabilities of its factors.
double product_event_lower(const CombinationRule& rule, std::span<const double> marginal_lower);
double product_event_upper(const CombinationRule& rule, std::span<const double> marginal_upper);

/// CDF of a real variable on a bounded support.  Values are 0 below
/// support_lo and 1 at and above support_hi.  `value` must be
/// right-continuous; `left_limit` gives F(x-).  `breakpoints` lists points
/// where the CDF has kinks or jumps.
class RealLineCdf {
 public:
  using Function = std::function<double(double)>;

  /// Piecewise-linear through knots (x_j, F_j) sorted by x; a repeated x
  /// encodes a jump (first knot = left limit, last = value).  Must start at
  /// F = 0 and end at F = 1.
  static RealLineCdf piecewise_linear(std::vector<std::pair<double, double>> knots);
  /// Unit point mass at x.
  static RealLineCdf point_mass(double x);
  static RealLineCdf from_functions(double support_lo, double support_hi, Function value, Function left_limit,
                                    std::vector<double> breakpoints);

  double operator()(double x) const;
  double left_limit(double x) const;
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  /// CDF of -X: x -> 1 - F((-x)-).
  RealLineCdf negated() const;
  /// CDF of 1/X for a strictly positive support: x -> 1 - F((1/x)-).
  RealLineCdf reciprocal() const;
  /// CDF of log X for a strictly positive support.
  RealLineCdf logarithm() const;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  Function value_;
  Function left_;
  std::vector<double> breakpoints_;
};

/// P-box of a real variable with bounded support.
struct RealLinePBox {
  RealLineCdf lower;
  RealLineCdf upper;

  static RealLinePBox precise(RealLineCdf cdf) { return {cdf, cdf}; }
  double support_lo() const { return std::min(lower.support_lo(), upper.support_lo()); }
  double support_hi() const { return std::max(lower.support_hi(), upper.support_hi()); }
  /// Throws ValidationError unless lower <= upper on a grid plus breakpoints.
  void validate() const;
};

/// Lower CDF of X1 + X2 under unknown dependence at y:
/// sup over x1 + x2 = y of max{0, lower1(x1) + lower2(x2) - 1}.
double prob_arith_add_lower(const RealLinePBox& x1, const RealLinePBox& x2, double y);
/// Upper CDF of X1 + X2 under unknown dependence at y:
/// inf over x1 + x2 = y of min{1, upper1(x1) + upper2(x2)}.
double prob_arith_add_upper(const RealLinePBox& x1, const RealLinePBox& x2, double y);

enum class ArithOp { kAdd, kSubtract, kMultiply, kDivide };

/// (lower, upper) CDF of X1 op X2 at y.  Subtraction and division reduce to
/// addition after negating (resp. inverting) X2; multiplication adds
/// logarithms.  Multiplication and division need strictly positive supports.
std::pair<double, double> prob_arith_transform(ArithOp op, const RealLinePBox& x1, const RealLinePBox& x2, double y);

/// The p-box of -X, 1/X or log X.
RealLinePBox negate(const RealLinePBox& x);
RealLinePBox reciprocal(const RealLinePBox& x);
RealLinePBox logarithm(const RealLinePBox& x);

}  // namespace pbox

#endif  // PBOX_MULTIVARIATE_HPP
