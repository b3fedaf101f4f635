#ifndef PBOX_PREORDER_HPP
#define PBOX_PREORDER_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace pbox {

/// Index used for the artificial predecessor of the smallest class.  Both
/// class indices and z-coordinates use it: it lies strictly below every
/// element of the space, and every cumulative distribution function is zero
/// there.
inline constexpr double kBottomSentinel = -1.0;

/// A totally preordered space presented through its quotient: an ordered list
/// of equivalence-class labels, smallest first.
class FiniteQuotientSpace {
 public:
  explicit FiniteQuotientSpace(std::vector<std::string> labels);

  /// Space with classes labelled "0", "1", ..., "n-1".
  static FiniteQuotientSpace with_size(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  /// Throws ValidationError for unknown labels.
  std::size_t index_of(const std::string& label) const;

  bool operator==(const FiniteQuotientSpace&) const = default;

 private:
  std::vector<std::string> labels_;
};

/// A subset of [0,1] of the form {z : lo <? z <? hi}, each endpoint open or
/// closed.  A degenerate interval with lo == hi and an open endpoint is empty.
struct ZInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  static ZInterval closed(double lo, double hi) { return {lo, hi, false, false}; }
  static ZInterval open(double lo, double hi) { return {lo, hi, true, true}; }
  static ZInterval left_open(double lo, double hi) { return {lo, hi, true, false}; }
  static ZInterval right_open(double lo, double hi) { return {lo, hi, false, true}; }

  bool empty() const { return lo > hi || (lo == hi && (lo_open || hi_open)); }
  bool contains(double z) const;

  bool operator==(const ZInterval&) const = default;
};

/// Throws ValidationError unless lo <= hi and both endpoints lie in [0,1].
void validate(const ZInterval& interval);

std::string to_string(const ZInterval& interval);

/// A normalized finite union of disjoint, non-touching intervals of [0,1],
/// sorted by lower endpoint.  Each member interval is a full component.
class ZEventSet {
 public:
  ZEventSet() = default;

  const std::vector<ZInterval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  bool contains(double z) const;

  bool operator==(const ZEventSet&) const = default;

 private:
  friend ZEventSet normalize(std::vector<ZInterval> intervals);
  std::vector<ZInterval> intervals_;
};

std::string to_string(const ZEventSet& event);

/// Merges overlapping or touching intervals, drops empty ones and sorts.
/// Endpoint comparisons are exact.
ZEventSet normalize(std::vector<ZInterval> intervals);

/// Maximal intervals of a normalized event; these are its full components.
std::vector<ZInterval> full_components_z(const ZEventSet& event);

/// Complement within [0,1].
ZEventSet complement_z(const ZEventSet& event);

/// {[0, z]} when closed, {[0, z)} otherwise.
ZEventSet sublevel_event(double z, bool closed);

/// A set of class indices of a FiniteQuotientSpace, kept sorted and unique.
class ClassSubset {
 public:
  ClassSubset() = default;
  ClassSubset(const FiniteQuotientSpace& space, std::vector<std::size_t> members);

  /// Subset whose members are the set bits of `mask` (bit i = class i).
  static ClassSubset from_mask(const FiniteQuotientSpace& space, unsigned long long mask);

  const std::vector<std::size_t>& members() const { return members_; }
  bool contains(std::size_t index) const;
  bool empty() const { return members_.empty(); }
  std::size_t space_size() const { return space_size_; }
  unsigned long long mask() const;

  /// Set complement within the space.
  ClassSubset complement() const;

  bool operator==(const ClassSubset&) const = default;

 private:
  std::size_t space_size_ = 0;
  std::vector<std::size_t> members_;
};

/// Closed run [first, last] of consecutive class indices.
struct ClassRange {
  std::size_t first = 0;
  std::size_t last = 0;
  bool operator==(const ClassRange&) const = default;
};

/// Maximal runs of consecutive indices; on a finite quotient these are the
/// full components of the subset.
std::vector<ClassRange> full_components_finite(const FiniteQuotientSpace& space,
                                               const ClassSubset& subset);

}  // namespace pbox

#endif  // PBOX_PREORDER_HPP
