#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pbox/error.hpp"
#include "pbox/preorder.hpp"

using namespace pbox;

namespace {

bool grid_agrees(const std::vector<ZInterval>& raw, const ZEventSet& set, double step) {
  for (double z = 0.0; z <= 1.0 + 1e-15; z += step) {
    bool in_raw = false;
    for (const auto& i : raw) in_raw = in_raw || i.contains(z);
    if (in_raw != set.contains(z)) return false;
  }
  return true;
}

}  // namespace

TEST(Normalize, TouchingHalfOpenMerge) {
  const auto s = normalize({ZInterval::left_open(0.0, 0.5), ZInterval::left_open(0.5, 0.7)});
  ASSERT_EQ(s.intervals().size(), 1u);
  EXPECT_EQ(s.intervals()[0], ZInterval::left_open(0.0, 0.7));
}

TEST(Normalize, EmptyInput) { EXPECT_TRUE(normalize({}).empty()); }

TEST(Normalize, OverlapKeepsOpenRightEnd) {
  const std::vector<ZInterval> raw = {ZInterval::closed(0.2, 0.4), ZInterval::right_open(0.3, 0.9)};
  const auto s = normalize(raw);
  ASSERT_EQ(s.intervals().size(), 1u);
  EXPECT_EQ(s.intervals()[0], ZInterval::right_open(0.2, 0.9));
  EXPECT_TRUE(grid_agrees(raw, s, 1e-3));
}

TEST(Normalize, OpenEndsAtSamePointStaySeparate) {
  const auto s = normalize({ZInterval::right_open(0.0, 0.5), ZInterval::left_open(0.5, 1.0)});
  EXPECT_EQ(s.intervals().size(), 2u);
  EXPECT_FALSE(s.contains(0.5));
}

TEST(Normalize, RejectsReversedInterval) {
  EXPECT_THROW(normalize({ZInterval::closed(0.6, 0.2)}), ValidationError);
  EXPECT_THROW(normalize({ZInterval::closed(-0.1, 0.2)}), ValidationError);
}

TEST(Normalize, DropsEmptyDegenerate) {
  EXPECT_TRUE(normalize({ZInterval::left_open(0.3, 0.3)}).empty());
  EXPECT_EQ(normalize({ZInterval::closed(0.3, 0.3)}).intervals().size(), 1u);
}

TEST(FullComponentsFinite, ConsecutiveRuns) {
  const auto space = FiniteQuotientSpace::with_size(5);
  const auto runs = full_components_finite(space, ClassSubset(space, {0, 2, 3}));
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0], (ClassRange{0, 0}));
  EXPECT_EQ(runs[1], (ClassRange{2, 3}));
}

TEST(FullComponentsFinite, WholeSpace) {
  const auto space = FiniteQuotientSpace::with_size(5);
  const auto runs = full_components_finite(space, ClassSubset(space, {0, 1, 2, 3, 4}));
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0], (ClassRange{0, 4}));
}

// maximal order-convex subsets found by trying every sub-range
TEST(FullComponentsFinite, MatchesBruteForce) {
  for (std::size_t n = 1; n <= 7; ++n) {
    const auto space = FiniteQuotientSpace::with_size(n);
    for (unsigned long long mask = 0; mask < (1ull << n); ++mask) {
      const auto subset = ClassSubset::from_mask(space, mask);
      std::vector<ClassRange> brute;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
          bool inside = true;
          for (std::size_t k = a; k <= b; ++k) inside = inside && subset.contains(k);
          if (!inside) continue;
          const bool left_max = a == 0 || !subset.contains(a - 1);
          const bool right_max = b + 1 == n || !subset.contains(b + 1);
          if (left_max && right_max) brute.push_back({a, b});
        }
      }
      EXPECT_EQ(full_components_finite(space, subset), brute) << "mask " << mask;
    }
  }
  const auto space = FiniteQuotientSpace::with_size(5);
  const auto runs = full_components_finite(space, ClassSubset(space, {1, 3}));
  EXPECT_EQ(runs, (std::vector<ClassRange>{{1, 1}, {3, 3}}));
}

TEST(FullComponentsZ, NormalizedFormIsDecomposition) {
  const auto s = normalize({ZInterval::closed(0.0, 0.3), ZInterval::left_open(0.6, 1.0)});
  const auto parts = full_components_z(s);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0], ZInterval::closed(0.0, 0.3));
  EXPECT_EQ(parts[1], ZInterval::left_open(0.6, 1.0));
  EXPECT_TRUE(full_components_z(ZEventSet{}).empty());
}

// connected components of a 1e-4 grid scan versus the interval decomposition
TEST(FullComponentsZ, RandomInputMatchesGridScan) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ZInterval> raw;
    for (int k = 0; k < 50; ++k) {
      double a = std::round(u(rng) * 1000) / 1000, b = std::round(u(rng) * 1000) / 1000;
      if (a > b) std::swap(a, b);
      b = std::min(b, std::round(a * 1000 + 20) / 1000);
      raw.push_back({a, b, u(rng) < 0.5, u(rng) < 0.5});
    }
    const auto set = normalize(raw);
    const auto parts = full_components_z(set);
    // endpoints are multiples of 1e-3, so a 1e-4 grid sees every gap
    std::size_t runs = 0;
    bool prev = false;
    for (int i = 0; i <= 10000; ++i) {
      const double z = i / 10000.0;
      bool in_raw = false;
      for (const auto& r : raw) in_raw = in_raw || r.contains(z);
      ASSERT_EQ(in_raw, set.contains(z)) << "z=" << z;
      if (in_raw && !prev) ++runs;
      prev = in_raw;
    }
    EXPECT_EQ(runs, parts.size());
  }
}

TEST(ComplementZ, Examples) {
  const auto c = complement_z(normalize({ZInterval::right_open(0.0, 0.4)}));
  ASSERT_EQ(c.intervals().size(), 1u);
  EXPECT_EQ(c.intervals()[0], ZInterval::closed(0.4, 1.0));
  const auto all = complement_z(ZEventSet{});
  ASSERT_EQ(all.intervals().size(), 1u);
  EXPECT_EQ(all.intervals()[0], ZInterval::closed(0.0, 1.0));
}

TEST(ComplementZ, InvolutionAndPartition) {
  const auto s = normalize({ZInterval::left_open(0.1, 0.2), ZInterval::closed(0.5, 0.5), ZInterval::open(0.7, 1.0)});
  const auto c = complement_z(s);
  EXPECT_EQ(complement_z(c), s);
  for (int i = 0; i <= 1000; ++i) {
    const double z = i / 1000.0;
    EXPECT_NE(s.contains(z), c.contains(z)) << z;
  }
}

TEST(SublevelEvent, Examples) {
  EXPECT_EQ(sublevel_event(1.0, true).intervals()[0], ZInterval::closed(0.0, 1.0));
  EXPECT_EQ(sublevel_event(0.0, true).intervals()[0], ZInterval::closed(0.0, 0.0));
  EXPECT_EQ(sublevel_event(0.37, true).intervals()[0], ZInterval::closed(0.0, 0.37));
  EXPECT_TRUE(sublevel_event(0.0, false).empty());
  EXPECT_THROW(sublevel_event(1.5, true), ValidationError);
}

TEST(ClassSubset, MaskRoundTripAndComplement) {
  const auto space = FiniteQuotientSpace::with_size(4);
  const auto s = ClassSubset::from_mask(space, 0b1010);
  EXPECT_EQ(s.members(), (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(s.mask(), 0b1010u);
  EXPECT_EQ(s.complement().mask(), 0b0101u);
  EXPECT_THROW(ClassSubset(space, {4}), ValidationError);
}

TEST(FiniteQuotientSpace, Labels) {
  const FiniteQuotientSpace space({"low", "mid", "high"});
  EXPECT_EQ(space.index_of("mid"), 1u);
  EXPECT_THROW(space.index_of("none"), ValidationError);
}
