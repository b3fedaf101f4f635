#include "pbox/pbox.hpp"

#include <algorithm>
#include <cstdio>

#include "pbox/error.hpp"

namespace pbox {
namespace {

constexpr double kOrderTolerance = 1e-12;

void check_ordered(const Cdf& lower, const Cdf& upper, double z) {
  if (lower.eval(z) > upper.eval(z) + kOrderTolerance ||
      lower.left_limit(z) > upper.left_limit(z) + kOrderTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "lower CDF exceeds upper CDF at z=%.12g", z);
    throw ValidationError(buf);
  }
}

}  // namespace

PBox::PBox(FiniteQuotientSpace space, Cdf lower, Cdf upper)
    : space_(std::move(space)), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (!lower_.is_step() || !upper_.is_step()) {
    throw ValidationError("a p-box over a finite space needs step CDFs");
  }
  if (lower_.num_classes() != space_->size() || upper_.num_classes() != space_->size()) {
    throw ValidationError("step CDF length does not match the number of classes");
  }
  validate(lower_);
  validate(upper_);
  for (std::size_t i = 0; i < space_->size(); ++i) check_ordered(lower_, upper_, static_cast<double>(i));
}

PBox::PBox(Cdf lower, Cdf upper, PBoxValidation validation)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.is_step() || upper_.is_step()) {
    throw ValidationError("a p-box over [0,1] cannot use step CDFs; give a finite space");
  }
  validate(lower_, validation.grid);
  validate(upper_, validation.grid);
  std::vector<double> zs = lower_.breakpoints();
  const auto more = upper_.breakpoints();
  zs.insert(zs.end(), more.begin(), more.end());
  const std::size_t n = std::max<std::size_t>(validation.grid, 2);
  for (std::size_t i = 0; i < n; ++i) zs.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
  for (double z : zs) check_ordered(lower_, upper_, z);
}

const FiniteQuotientSpace& PBox::finite_space() const {
  if (!space_) throw ValidationError("p-box is defined over [0,1], not a finite space");
  return *space_;
}

double lower_prob_field(const PBox& pbox, std::span<const double> endpoints) {
  if (endpoints.empty() || endpoints.size() % 2 != 0) {
    throw ValidationError("field event needs an even, non-zero number of endpoints");
  }
  for (std::size_t i = 1; i < endpoints.size(); ++i) {
    if (!(endpoints[i - 1] < endpoints[i])) throw ValidationError("field event endpoints must be strictly increasing");
    if (endpoints[i] == kBottomSentinel) throw ValidationError("only the first endpoint may be the bottom sentinel");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < endpoints.size(); k += 2) {
    total += std::max(0.0, pbox.lower().eval(endpoints[k + 1]) - pbox.upper().eval(endpoints[k]));
  }
  return std::min(total, 1.0);
}

double lower_prob_interval(const PBox& pbox, const ZInterval& interval) {
  if (pbox.is_finite()) throw ValidationError("z-interval given for a finite p-box");
  validate(interval);
  if (interval.empty()) throw ValidationError("degenerate interval " + to_string(interval) + " is empty");
  const double top = interval.hi_open ? pbox.lower().left_limit(interval.hi) : pbox.lower().eval(interval.hi);
  // Only 0 has an immediate predecessor on a connected quotient.
  const double bottom = (!interval.lo_open && interval.lo == 0.0) ? 0.0 : pbox.upper().eval(interval.lo);
  return std::max(0.0, top - bottom);
}

double lower_prob_interval(const PBox& pbox, ClassRange range) {
  const auto& space = pbox.finite_space();
  if (range.first > range.last || range.last >= space.size()) {
    throw ValidationError("class range out of order or out of range");
  }
  const double before = static_cast<double>(range.first) - 1.0;
  return std::max(0.0, pbox.lower().eval(static_cast<double>(range.last)) - pbox.upper().eval(before));
}

double lower_prob_event(const PBox& pbox, const ZEventSet& interior_image) {
  double total = 0.0;
  for (const auto& component : full_components_z(interior_image)) {
    total += lower_prob_interval(pbox, component);
  }
  return std::min(total, 1.0);
}

double lower_prob_event(const PBox& pbox, const ClassSubset& interior) {
  double total = 0.0;
  for (const auto& run : full_components_finite(pbox.finite_space(), interior)) {
    total += lower_prob_interval(pbox, run);
  }
  return std::min(total, 1.0);
}

double upper_prob_event(const PBox& pbox, const ZEventSet& complement_interior_image) {
  return 1.0 - lower_prob_event(pbox, complement_interior_image);
}

double upper_prob_event(const PBox& pbox, const ClassSubset& complement_interior) {
  return 1.0 - lower_prob_event(pbox, complement_interior);
}

PBox best_pbox_approximation(const FiniteQuotientSpace& space, std::vector<double> lower_values,
                             std::vector<double> upper_values) {
  return PBox(space, Cdf::step(std::move(lower_values)), Cdf::step(std::move(upper_values)));
}

PBox best_pbox_approximation(std::function<double(double)> lower_values,
                             std::function<double(double)> upper_values) {
  return PBox(Cdf::analytic("approx-lower", std::move(lower_values)),
              Cdf::analytic("approx-upper", std::move(upper_values)));
}

}  // namespace pbox
