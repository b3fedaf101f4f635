#ifndef PBOX_CDF_HPP
#define PBOX_CDF_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pbox {

/// Cumulative distribution function on a quotient space.
///
/// Three representations share one evaluation interface:
///  - step: one value per class of a finite quotient space; coordinates are
///    class indices passed as doubles (0, 1, ..., n-1);
///  - piecewise linear: knots (z_j, F_j) on [0,1], linearly interpolated;
///    a repeated z encodes a jump (the last knot at z gives F(z), the first
///    gives F(z-));
///  - analytic: a named function of z with an optional left-limit companion.
///
/// Every representation evaluates to 0 at kBottomSentinel.
class Cdf {
 public:
  using Function = std::function<double(double)>;

  struct Step {
    std::vector<double> values;
  };
  struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;
  };
  struct Analytic {
    std::string name;
    Function value;
    Function left_limit;  // empty when continuous
    bool continuous = true;
  };

  static Cdf step(std::vector<double> values);
  static Cdf piecewise_linear(std::vector<std::pair<double, double>> knots);
  /// A continuous analytic CDF: left limits equal values.
  static Cdf analytic(std::string name, Function value);
  /// An analytic CDF with discontinuities; `left_limit` must return
  /// sup_{y<z} F(y).
  static Cdf analytic_with_jumps(std::string name, Function value, Function left_limit);

  bool is_step() const { return std::holds_alternative<Step>(rep_); }
  bool is_piecewise_linear() const { return std::holds_alternative<PiecewiseLinear>(rep_); }
  bool is_analytic() const { return std::holds_alternative<Analytic>(rep_); }
  /// True when F(z-) == F(z) everywhere on (0,1].
  bool continuous() const;

  /// Number of classes of a step CDF; 0 otherwise.
  std::size_t num_classes() const;
  const std::vector<double>& step_values() const;
  /// z-coordinates of knots (piecewise linear) or class indices (step).
  std::vector<double> breakpoints() const;
  std::string description() const;

  double operator()(double z) const { return eval(z); }
  double eval(double z) const;
  double left_limit(double z) const;

 private:
  using Rep = std::variant<Step, PiecewiseLinear, Analytic>;
  explicit Cdf(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

double cdf_eval(const Cdf& cdf, double z);
double cdf_left_limit(const Cdf& cdf, double z);

/// Non-decreasing, in [0,1], and 1 at the top element.  Analytic forms are
/// sampled on `grid` uniform points.  Throws ValidationError.
void validate(const Cdf& cdf, std::size_t grid = 10000);

}  // namespace pbox

#endif  // PBOX_CDF_HPP
