#ifndef PBOX_PBOX_HPP
#define PBOX_PBOX_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pbox/cdf.hpp"
#include "pbox/preorder.hpp"

namespace pbox {

/// Options for checking lower <= upper on a continuum, where only sampling is
/// possible for black-box analytic forms.
struct PBoxValidation {
  std::size_t grid = 10000;
};

/// A pair of CDFs (lower, upper) with lower <= upper pointwise, over either a
/// finite quotient space (step CDFs) or the unit interval of z-values induced
/// by a surjective mapping onto [0,1].
class PBox {
 public:
  /// P-box over a finite quotient; both CDFs must be step CDFs of matching size.
  PBox(FiniteQuotientSpace space, Cdf lower, Cdf upper);
  /// P-box over [0,1].
  PBox(Cdf lower, Cdf upper, PBoxValidation validation = {});

  static PBox precise(FiniteQuotientSpace space, Cdf cdf) { return PBox(std::move(space), cdf, cdf); }
  static PBox precise(Cdf cdf) { return PBox(cdf, cdf); }

  bool is_finite() const { return space_.has_value(); }
  /// Throws ValidationError for continuum p-boxes.
  const FiniteQuotientSpace& finite_space() const;
  const Cdf& lower() const { return lower_; }
  const Cdf& upper() const { return upper_; }

 private:
  std::optional<FiniteQuotientSpace> space_;
  Cdf lower_;
  Cdf upper_;
};

/// Lower probability of a member of the field generated by the sublevel sets:
/// the union of (x0,x1], (x2,x3], ... given by strictly increasing endpoints.
/// x0 may be kBottomSentinel so that the first piece starts at the bottom.
/// Returns sum_k max{0, lower(x_{2k+1}) - upper(x_{2k})}.
double lower_prob_field(const PBox& pbox, std::span<const double> endpoints);

/// Lower probability of one interval of a continuum p-box.  On a connected
/// quotient only z = 0 has an immediate predecessor (the sentinel).
double lower_prob_interval(const PBox& pbox, const ZInterval& interval);
/// Lower probability of the full set [first, last] of a finite p-box.
double lower_prob_interval(const PBox& pbox, ClassRange range);

/// Lower probability of an event given the z-image of its interior.  Sums the
/// interval formula over full components.
double lower_prob_event(const PBox& pbox, const ZEventSet& interior_image);
double lower_prob_event(const PBox& pbox, const ClassSubset& interior);

/// Upper probability of an event given the z-image of the interior of its
/// complement: 1 - lower_prob_event of that set.
double upper_prob_event(const PBox& pbox, const ZEventSet& complement_interior_image);
double upper_prob_event(const PBox& pbox, const ClassSubset& complement_interior);

/// Tightest p-box dominated by a model with the given lower/upper
/// probabilities of the sublevel sets [0, z].
PBox best_pbox_approximation(const FiniteQuotientSpace& space, std::vector<double> lower_values,
                             std::vector<double> upper_values);
PBox best_pbox_approximation(std::function<double(double)> lower_values,
                             std::function<double(double)> upper_values);

}  // namespace pbox

#endif  // PBOX_PBOX_HPP
