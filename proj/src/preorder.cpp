#include "pbox/preorder.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "pbox/error.hpp"

namespace pbox {

FiniteQuotientSpace::FiniteQuotientSpace(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("quotient space needs at least one class");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw ValidationError("duplicate class label '" + l + "'");
  }
}

FiniteQuotientSpace FiniteQuotientSpace::with_size(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return FiniteQuotientSpace(std::move(labels));
}

std::size_t FiniteQuotientSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw ValidationError("unknown class label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

bool ZInterval::contains(double z) const {
  const bool above = lo_open ? z > lo : z >= lo;
  const bool below = hi_open ? z < hi : z <= hi;
  return above && below;
}

void validate(const ZInterval& interval) {
  if (!(interval.lo <= interval.hi)) {
    throw ValidationError("malformed interval " + to_string(interval) + ": lo > hi");
  }
  if (interval.lo < 0.0 || interval.hi > 1.0) {
    throw ValidationError("interval " + to_string(interval) + " leaves [0,1]");
  }
}

std::string to_string(const ZInterval& interval) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%c%.12g, %.12g%c", interval.lo_open ? '(' : '[', interval.lo,
                interval.hi, interval.hi_open ? ')' : ']');
  return buf;
}

bool ZEventSet::contains(double z) const {
  // Intervals are sorted and disjoint: only the last one starting at or
  // before z can contain it.
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), z,
                             [](double v, const ZInterval& i) { return v < i.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->contains(z);
}

std::string to_string(const ZEventSet& event) {
  if (event.empty()) return "{}";
  std::string out = "{";
  for (std::size_t i = 0; i < event.intervals().size(); ++i) {
    if (i) out += " u ";
    out += to_string(event.intervals()[i]);
  }
  return out + "}";
}

ZEventSet normalize(std::vector<ZInterval> intervals) {
  for (const auto& i : intervals) validate(i);
  std::erase_if(intervals, [](const ZInterval& i) { return i.empty(); });
  std::sort(intervals.begin(), intervals.end(), [](const ZInterval& a, const ZInterval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return !a.lo_open && b.lo_open;
  });

  ZEventSet out;
  for (const auto& next : intervals) {
    if (out.intervals_.empty()) {
      out.intervals_.push_back(next);
      continue;
    }
    ZInterval& cur = out.intervals_.back();
    const bool joins = next.lo < cur.hi || (next.lo == cur.hi && !(cur.hi_open && next.lo_open));
    if (!joins) {
      out.intervals_.push_back(next);
      continue;
    }
    if (next.hi > cur.hi) {
      cur.hi = next.hi;
      cur.hi_open = next.hi_open;
    } else if (next.hi == cur.hi) {
      cur.hi_open = cur.hi_open && next.hi_open;
    }
  }
  return out;
}

std::vector<ZInterval> full_components_z(const ZEventSet& event) { return event.intervals(); }

ZEventSet complement_z(const ZEventSet& event) {
  std::vector<ZInterval> gaps;
  double lo = 0.0;
  bool lo_open = false;
  for (const auto& i : event.intervals()) {
    ZInterval gap{lo, i.lo, lo_open, !i.lo_open};
    if (!gap.empty()) gaps.push_back(gap);
    lo = i.hi;
    lo_open = !i.hi_open;
  }
  ZInterval tail{lo, 1.0, lo_open, false};
  if (!tail.empty()) gaps.push_back(tail);
  return normalize(std::move(gaps));
}

ZEventSet sublevel_event(double z, bool closed) {
  if (!(z >= 0.0 && z <= 1.0)) throw ValidationError("sublevel point outside [0,1]");
  return normalize({ZInterval{0.0, z, false, !closed}});
}

ClassSubset::ClassSubset(const FiniteQuotientSpace& space, std::vector<std::size_t> members)
    : space_size_(space.size()), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= space_size_) {
    throw ValidationError("class index " + std::to_string(members_.back()) + " out of range");
  }
}

ClassSubset ClassSubset::from_mask(const FiniteQuotientSpace& space, unsigned long long mask) {
  if (space.size() < 64 && (mask >> space.size()) != 0) {
    throw ValidationError("subset mask has bits beyond the space size");
  }
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < space.size() && i < 64; ++i) {
    if (mask & (1ULL << i)) members.push_back(i);
  }
  return ClassSubset(space, std::move(members));
}

bool ClassSubset::contains(std::size_t index) const {
  return std::binary_search(members_.begin(), members_.end(), index);
}

unsigned long long ClassSubset::mask() const {
  unsigned long long m = 0;
  for (auto i : members_) {
    if (i < 64) m |= 1ULL << i;
  }
  return m;
}

ClassSubset ClassSubset::complement() const {
  ClassSubset out;
  out.space_size_ = space_size_;
  for (std::size_t i = 0; i < space_size_; ++i) {
    if (!contains(i)) out.members_.push_back(i);
  }
  return out;
}

std::vector<ClassRange> full_components_finite(const FiniteQuotientSpace& space,
                                               const ClassSubset& subset) {
  if (subset.space_size() != space.size()) {
    throw ValidationError("class subset belongs to a space of different size");
  }
  std::vector<ClassRange> runs;
  for (auto i : subset.members()) {
    if (!runs.empty() && runs.back().last + 1 == i) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i});
    }
  }
  return runs;
}

}  // namespace pbox
