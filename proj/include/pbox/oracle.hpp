#ifndef PBOX_ORACLE_HPP
#define PBOX_ORACLE_HPP

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pbox/pbox.hpp"

namespace pbox::oracle {

using Rational = mpq_class;

/// Finite credal polytope {p >= 0, sum p = 1, lower_cum[k] <= p_0+..+p_k <= upper_cum[k]}.
struct FiniteCredalInstance {
  std::size_t n = 0;
  std::vector<double> lower_cum;
  std::vector<double> upper_cum;

  static FiniteCredalInstance from_pbox(const PBox& pbox);
  /// Throws ValidationError on non-monotone, out-of-range or unordered bounds.
  void validate() const;
};

/// Lower probability on all subsets of {0..n-1}, indexed by bit mask.
struct FiniteLowerProbability {
  std::size_t n = 0;
  std::vector<double> values;

  double operator()(std::uint32_t mask) const { return values.at(mask); }
  /// Lower envelope of a finite set of mass functions.
  static FiniteLowerProbability envelope(const std::vector<std::vector<double>>& pmfs);
  /// Throws ValidationError unless value(empty) = 0, value(full) = 1 and monotone.
  void validate() const;
};

std::string mask_to_string(std::uint32_t mask, std::size_t n);

// ---- exact linear programming -------------------------------------------

enum class Sense { kLessEqual, kEqual, kGreaterEqual };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

/// minimize cost . x subject to rows[i] . x (sense) rhs[i], x >= 0.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<std::vector<Rational>> rows;
  std::vector<Sense> senses;
  std::vector<Rational> rhs;
  std::vector<Rational> cost;

  void add_row(std::vector<Rational> coefficients, Sense sense, Rational value);
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Rational value;
  std::vector<Rational> x;
};

/// Dense two-phase simplex with Bland's rule in exact arithmetic.
LpSolution solve_lp(const LinearProgram& lp);

/// Cumulative vectors (c_0, ..., c_{n-1}) of the vertices of the credal
/// polytope, found by enumerating which constraint is active at each c_k.
std::vector<std::vector<Rational>> credal_vertices(const FiniteCredalInstance& instance);

/// Exact minimum of sum p_i g_i over the credal polytope: vertex enumeration
/// for n <= 8, simplex for 8 < n <= 20.  Throws ConsistencyError if empty.
Rational lp_lower_expectation_exact(const FiniteCredalInstance& instance, const std::vector<double>& gamble);
double lp_lower_expectation(const FiniteCredalInstance& instance, const std::vector<double>& gamble);

/// Same minimum over a precomputed vertex list.
Rational min_over_vertices(const std::vector<std::vector<Rational>>& vertices, const std::vector<double>& gamble);

/// Natural extension of the p-box to all subsets, by exact LP.
FiniteLowerProbability lp_natural_extension(const FiniteCredalInstance& instance);

/// Lower probability of an event of a product space under unknown
/// dependence: minimum of its joint mass over all joint mass functions whose
/// marginals lie in the given credal polytopes.  Product points are indexed
/// with the first factor varying fastest.
Rational product_lower_probability(const std::vector<FiniteCredalInstance>& marginals,
                                   const std::vector<bool>& event);
/// The same for every subset of the product space (at most 16 points).
FiniteLowerProbability product_natural_extension(const std::vector<FiniteCredalInstance>& marginals);

/// Minimum precise expectation over `samples` random CDFs inside the bands.
double envelope_sample_bound(const FiniteCredalInstance& instance, const std::vector<double>& gamble,
                             std::size_t samples, std::uint64_t seed);

// ---- checkers -------------------------------------------------------------

struct MonotonicityViolation {
  std::vector<std::uint32_t> sets;
  double lhs = 0.0;  // lower probability of the union
  double rhs = 0.0;  // inclusion-exclusion sum over the intersections
};

struct MonotonicityReport {
  bool passed = true;
  std::size_t tuples_checked = 0;
  std::vector<MonotonicityViolation> violations;  // capped at max_reported
};

/// Checks P(A_1 u .. u A_p) >= sum over non-empty I of (-1)^{|I|+1} P(cap A_i)
/// - 1e-12 for all p in [2, p_max] and all p-sets of distinct events.
/// Refuses n > 5 or p_max > 4 with ValidationError.
MonotonicityReport complete_monotonicity_check(const FiniteLowerProbability& lp, std::size_t p_max,
                                               std::size_t max_reported = 64);

struct RepresentabilityMismatch {
  std::uint32_t subset = 0;
  double formula = 0.0;
  double stored = 0.0;
};

struct RepresentabilityReport {
  std::vector<double> lower_cum;
  std::vector<double> upper_cum;
  std::vector<RepresentabilityMismatch> mismatches;
  bool representable() const { return mismatches.empty(); }
};

/// Derives (F_lower, F_upper) from lp under the total order `ordering`
/// (ordering[r] is the class at rank r) and compares every subset with the
/// p-box interval formula.  Empty report iff lp is that p-box's extension.
RepresentabilityReport pbox_representability_check(const FiniteLowerProbability& lp,
                                                   const std::vector<std::size_t>& ordering, double tol = 1e-12);

struct AdditivityViolation {
  std::uint32_t subset = 0;
  double whole = 0.0;
  double sum_of_components = 0.0;
};

struct AdditivityReport {
  std::size_t trials = 0;
  std::vector<AdditivityViolation> violations;
};

/// For `trials` random subsets, compares the LP lower probability of the
/// subset with the sum over its maximal runs of consecutive classes.
AdditivityReport additivity_check(const FiniteCredalInstance& instance, std::size_t trials, std::uint64_t seed,
                                  double tol = 1e-9);

// ---- campaign ---------------------------------------------------------------

struct CampaignConfig {
  std::uint64_t seed = 42;
  std::size_t trials = 200;
  std::size_t n_max = 6;
  std::size_t events_per_instance = 10;
  std::size_t gambles_per_instance = 5;
  std::size_t monotonicity_instances = 50;  // first instances with n <= 5 also get the p <= 4 check
  std::size_t additivity_trials = 10;
  double tol = 1e-9;
  bool inject_fault = false;  // corrupts the event formula on multi-component subsets
};

struct CampaignReport {
  std::size_t instances = 0;
  std::size_t event_checks = 0;
  std::size_t gamble_checks = 0;
  std::size_t monotonicity_checks = 0;
  std::size_t additivity_checks = 0;
  std::size_t representability_checks = 0;
  double max_event_error = 0.0;
  double max_gamble_error = 0.0;
  std::vector<std::string> violations;
  bool passed() const { return violations.empty(); }
};

/// Random finite p-box with n classes; values are rounded to multiples of
/// 1/20 half of the time so that ties and zero differences occur.
PBox random_finite_pbox(std::size_t n, std::uint64_t seed);

/// Compares the event and gamble formulas against the exact LP on random
/// instances and runs the monotonicity, additivity and representability
/// checkers.  Deterministic for a fixed seed.
CampaignReport run_campaign(const CampaignConfig& config);

}  // namespace pbox::oracle

#endif  // PBOX_ORACLE_HPP
