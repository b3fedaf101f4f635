#include "pbox/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "pbox/choquet.hpp"
#include "pbox/error.hpp"

namespace pbox::oracle {
namespace {

constexpr std::size_t kVertexEnumerationMax = 8;
constexpr std::size_t kSimplexMax = 20;
constexpr double kMonotonicityTolerance = 1e-12;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint64_t out[1];
  std::uint32_t parts[2];
  seq.generate(parts, parts + 2);
  out[0] = (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
  return out[0];
}

// ---- simplex --------------------------------------------------------------

struct Tableau {
  std::vector<std::vector<Rational>> a;  // rows x (cols + 1); last column is the rhs
  std::vector<std::size_t> basis;
  std::size_t cols = 0;
};

void pivot(Tableau& t, std::vector<Rational>& obj, std::size_t row, std::size_t col) {
  auto& pr = t.a[row];
  const Rational inv = 1 / pr[col];
  for (auto& v : pr) v *= inv;
  auto eliminate = [&](std::vector<Rational>& r) {
    if (r[col] == 0) return;
    const Rational factor = r[col];
    for (std::size_t j = 0; j <= t.cols; ++j) {
      if (pr[j] != 0) r[j] -= factor * pr[j];
    }
  };
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    if (i != row) eliminate(t.a[i]);
  }
  eliminate(obj);
  t.basis[row] = col;
}

// Returns false when the objective is unbounded below.
bool run_simplex(Tableau& t, std::vector<Rational>& obj, const std::vector<bool>& allowed) {
  while (true) {
    std::size_t enter = t.cols;
    for (std::size_t j = 0; j < t.cols; ++j) {
      if (allowed[j] && obj[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == t.cols) return true;
    std::size_t leave = t.a.size();
    Rational best_ratio;
    for (std::size_t i = 0; i < t.a.size(); ++i) {
      if (t.a[i][enter] <= 0) continue;
      const Rational ratio = t.a[i][t.cols] / t.a[i][enter];
      if (leave == t.a.size() || ratio < best_ratio ||
          (ratio == best_ratio && t.basis[i] < t.basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == t.a.size()) return false;
    pivot(t, obj, leave, enter);
  }
}

std::vector<Rational> objective_row(const Tableau& t, const std::vector<Rational>& cost) {
  std::vector<Rational> obj(t.cols + 1);
  for (std::size_t j = 0; j < cost.size(); ++j) obj[j] = cost[j];
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    const Rational cb = t.basis[i] < cost.size() ? cost[t.basis[i]] : Rational(0);
    if (cb == 0) continue;
    for (std::size_t j = 0; j <= t.cols; ++j) obj[j] -= cb * t.a[i][j];
  }
  return obj;
}

// ---- vertex enumeration --------------------------------------------------

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::vector<Rational> to_rational(const std::vector<double>& v) {
  std::vector<Rational> out;
  out.reserve(v.size());
  for (double d : v) out.emplace_back(d);
  return out;
}

Rational expectation_of_cumulative(const std::vector<Rational>& c, const std::vector<Rational>& g) {
  Rational total = 0;
  Rational prev = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    total += (c[k] - prev) * g[k];
    prev = c[k];
  }
  return total;
}

LinearProgram credal_lp(const FiniteCredalInstance& inst, const std::vector<double>& gamble) {
  LinearProgram lp;
  lp.num_vars = inst.n;
  lp.cost = to_rational(gamble);
  lp.add_row(std::vector<Rational>(inst.n, 1), Sense::kEqual, 1);
  for (std::size_t k = 0; k + 1 < inst.n; ++k) {
    std::vector<Rational> row(inst.n, 0);
    for (std::size_t i = 0; i <= k; ++i) row[i] = 1;
    lp.add_row(row, Sense::kGreaterEqual, Rational(inst.lower_cum[k]));
    lp.add_row(std::move(row), Sense::kLessEqual, Rational(inst.upper_cum[k]));
  }
  return lp;
}

std::vector<std::pair<std::size_t, std::size_t>> runs_of(std::uint32_t mask, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < n) {
    if (!(mask >> i & 1u)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && (mask >> (j + 1) & 1u)) ++j;
    runs.emplace_back(i, j);
    i = j + 1;
  }
  return runs;
}

std::vector<double> indicator(std::uint32_t mask, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = (mask >> i & 1u) ? 1.0 : 0.0;
  return g;
}

}  // namespace

FiniteCredalInstance FiniteCredalInstance::from_pbox(const PBox& pbox) {
  FiniteCredalInstance inst;
  inst.n = pbox.finite_space().size();
  inst.lower_cum = pbox.lower().step_values();
  inst.upper_cum = pbox.upper().step_values();
  return inst;
}

void FiniteCredalInstance::validate() const {
  if (n == 0 || lower_cum.size() != n || upper_cum.size() != n) {
    throw ValidationError("credal instance needs n > 0 and bounds of length n");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(lower_cum[k] >= 0.0 && upper_cum[k] <= 1.0 && lower_cum[k] <= upper_cum[k])) {
      throw ValidationError("credal instance bounds must satisfy 0 <= lower <= upper <= 1");
    }
    if (k && (lower_cum[k] < lower_cum[k - 1] || upper_cum[k] < upper_cum[k - 1])) {
      throw ValidationError("credal instance bounds must be non-decreasing");
    }
  }
  if (lower_cum[n - 1] != 1.0 || upper_cum[n - 1] != 1.0) {
    throw ValidationError("credal instance bounds must end at 1");
  }
}

FiniteLowerProbability FiniteLowerProbability::envelope(const std::vector<std::vector<double>>& pmfs) {
  if (pmfs.empty()) throw ValidationError("envelope needs at least one mass function");
  const std::size_t n = pmfs.front().size();
  if (n == 0 || n > 20) throw ValidationError("envelope needs 1..20 points");
  FiniteLowerProbability lp;
  lp.n = n;
  lp.values.assign(std::size_t{1} << n, 0.0);
  for (std::uint32_t mask = 0; mask < lp.values.size(); ++mask) {
    double best = 1.0;
    for (const auto& p : pmfs) {
      if (p.size() != n) throw ValidationError("mass functions differ in length");
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1u) s += p[i];
      }
      best = std::min(best, s);
    }
    lp.values[mask] = mask == 0 ? 0.0 : (mask + 1 == lp.values.size() ? 1.0 : best);
  }
  return lp;
}

void FiniteLowerProbability::validate() const {
  if (n == 0 || n > 20 || values.size() != (std::size_t{1} << n)) {
    throw ValidationError("lower probability needs 2^n values for 1 <= n <= 20");
  }
  if (values.front() != 0.0 || values.back() != 1.0) {
    throw ValidationError("lower probability must be 0 on the empty set and 1 on the whole space");
  }
  for (std::uint32_t mask = 0; mask < values.size(); ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t bigger = mask | (1u << i);
      if (values[bigger] < values[mask] - kMonotonicityTolerance) {
        throw ValidationError("lower probability is not monotone at " + mask_to_string(mask, n));
      }
    }
  }
}

std::string mask_to_string(std::uint32_t mask, std::size_t n) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mask >> i & 1u)) continue;
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

void LinearProgram::add_row(std::vector<Rational> coefficients, Sense sense, Rational value) {
  if (coefficients.size() != num_vars) throw ValidationError("LP row has the wrong number of coefficients");
  rows.push_back(std::move(coefficients));
  senses.push_back(sense);
  rhs.push_back(std::move(value));
}

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t m = lp.rows.size();
  const std::size_t nv = lp.num_vars;
  if (lp.cost.size() != nv) throw ValidationError("LP cost has the wrong length");

  // Columns: structural | one slack or surplus per inequality | artificials.
  std::vector<Sense> senses = lp.senses;
  std::vector<std::vector<Rational>> rows = lp.rows;
  std::vector<Rational> rhs = lp.rhs;
  for (std::size_t i = 0; i < m; ++i) {
    if (rhs[i] < 0) {
      for (auto& v : rows[i]) v = -v;
      rhs[i] = -rhs[i];
      if (senses[i] == Sense::kLessEqual) {
        senses[i] = Sense::kGreaterEqual;
      } else if (senses[i] == Sense::kGreaterEqual) {
        senses[i] = Sense::kLessEqual;
      }
    }
  }
  std::size_t slacks = 0;
  std::size_t artificials = 0;
  for (auto s : senses) {
    if (s != Sense::kEqual) ++slacks;
    if (s != Sense::kLessEqual) ++artificials;
  }
  Tableau t;
  t.cols = nv + slacks + artificials;
  t.a.assign(m, std::vector<Rational>(t.cols + 1));
  t.basis.assign(m, 0);
  std::size_t next_slack = nv;
  std::size_t next_art = nv + slacks;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < nv; ++j) t.a[i][j] = rows[i][j];
    t.a[i][t.cols] = rhs[i];
    if (senses[i] == Sense::kLessEqual) {
      t.a[i][next_slack] = 1;
      t.basis[i] = next_slack++;
    } else {
      if (senses[i] == Sense::kGreaterEqual) t.a[i][next_slack++] = -1;
      t.a[i][next_art] = 1;
      t.basis[i] = next_art++;
    }
  }
  const std::size_t first_art = nv + slacks;

  LpSolution sol;
  std::vector<bool> allowed(t.cols, true);
  if (artificials > 0) {
    std::vector<Rational> phase1(t.cols, 0);
    for (std::size_t j = first_art; j < t.cols; ++j) phase1[j] = 1;
    auto obj = objective_row(t, phase1);
    run_simplex(t, obj, allowed);
    if (-obj[t.cols] > 0) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Drive remaining zero-level artificials out of the basis, dropping
    // redundant rows.
    for (std::size_t i = 0; i < t.a.size();) {
      if (t.basis[i] < first_art) {
        ++i;
        continue;
      }
      std::size_t col = first_art;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (t.a[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col == first_art) {
        t.a.erase(t.a.begin() + static_cast<std::ptrdiff_t>(i));
        t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      std::vector<Rational> dummy(t.cols + 1);
      pivot(t, dummy, i, col);
      ++i;
    }
    for (std::size_t j = first_art; j < t.cols; ++j) allowed[j] = false;
  }
  auto obj = objective_row(t, lp.cost);
  if (!run_simplex(t, obj, allowed)) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.value = -obj[t.cols];
  sol.x.assign(nv, 0);
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    if (t.basis[i] < nv) sol.x[t.basis[i]] = t.a[i][t.cols];
  }
  return sol;
}

std::vector<std::vector<Rational>> credal_vertices(const FiniteCredalInstance& instance) {
  instance.validate();
  const std::size_t n = instance.n;
  if (n > kVertexEnumerationMax) throw ValidationError("vertex enumeration is limited to 8 classes");
  if (n == 1) return {{Rational(1)}};
  const std::size_t free = n - 1;  // c_0 .. c_{n-2}; c_{n-1} = 1
  const auto lo = to_rational(instance.lower_cum);
  const auto hi = to_rational(instance.upper_cum);
  const std::size_t zero = free;
  const std::size_t one = free + 1;

  std::set<std::vector<Rational>> found;
  std::vector<int> state(free, 0);  // 0: lower, 1: upper, 2: equals previous, 3: equals next
  std::size_t combos = 1;
  for (std::size_t k = 0; k < free; ++k) combos *= 4;
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    for (std::size_t k = 0; k < free; ++k) {
      state[k] = static_cast<int>(c % 4);
      c /= 4;
    }
    UnionFind uf(free + 2);
    for (std::size_t k = 0; k < free; ++k) {
      if (state[k] == 2) uf.unite(k, k == 0 ? zero : k - 1);
      if (state[k] == 3) uf.unite(k, k + 1 == free ? one : k + 1);
    }
    std::vector<const Rational*> anchor(free + 2, nullptr);
    const Rational r0 = 0;
    const Rational r1 = 1;
    bool ok = true;
    auto set_anchor = [&](std::size_t node, const Rational& value) {
      const std::size_t root = uf.find(node);
      if (anchor[root] && *anchor[root] != value) ok = false;
      anchor[root] = &value;
    };
    set_anchor(zero, r0);
    set_anchor(one, r1);
    for (std::size_t k = 0; k < free && ok; ++k) {
      if (state[k] == 0) set_anchor(k, lo[k]);
      if (state[k] == 1) set_anchor(k, hi[k]);
    }
    if (!ok) continue;
    std::vector<Rational> cum(n);
    for (std::size_t k = 0; k < free && ok; ++k) {
      const Rational* v = anchor[uf.find(k)];
      if (!v) {
        ok = false;
        break;
      }
      cum[k] = *v;
    }
    if (!ok) continue;
    cum[n - 1] = 1;
    Rational prev = 0;
    for (std::size_t k = 0; k < n && ok; ++k) {
      if (cum[k] < prev || (k < free && (cum[k] < lo[k] || cum[k] > hi[k]))) ok = false;
      prev = cum[k];
    }
    if (ok) found.insert(std::move(cum));
  }
  if (found.empty()) throw ConsistencyError("credal polytope has no vertices");
  return {found.begin(), found.end()};
}

Rational min_over_vertices(const std::vector<std::vector<Rational>>& vertices, const std::vector<double>& gamble) {
  if (vertices.empty()) throw ConsistencyError("empty vertex list");
  if (gamble.size() != vertices.front().size()) throw ValidationError("gamble length does not match the space");
  const auto g = to_rational(gamble);
  Rational best = expectation_of_cumulative(vertices.front(), g);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    Rational v = expectation_of_cumulative(vertices[i], g);
    if (v < best) best = v;
  }
  return best;
}

Rational lp_lower_expectation_exact(const FiniteCredalInstance& instance, const std::vector<double>& gamble) {
  instance.validate();
  if (gamble.size() != instance.n) throw ValidationError("gamble length does not match the space");
  if (instance.n <= kVertexEnumerationMax) return min_over_vertices(credal_vertices(instance), gamble);
  if (instance.n > kSimplexMax) throw ValidationError("exact LP oracle is limited to 20 classes");
  const auto sol = solve_lp(credal_lp(instance, gamble));
  if (sol.status != LpStatus::kOptimal) throw ConsistencyError("credal LP has no optimum");
  return sol.value;
}

double lp_lower_expectation(const FiniteCredalInstance& instance, const std::vector<double>& gamble) {
  return lp_lower_expectation_exact(instance, gamble).get_d();
}

FiniteLowerProbability lp_natural_extension(const FiniteCredalInstance& instance) {
  instance.validate();
  if (instance.n > kVertexEnumerationMax) throw ValidationError("natural extension table is limited to 8 classes");
  const auto vertices = credal_vertices(instance);
  FiniteLowerProbability lp;
  lp.n = instance.n;
  lp.values.resize(std::size_t{1} << instance.n);
  for (std::uint32_t mask = 0; mask < lp.values.size(); ++mask) {
    lp.values[mask] = min_over_vertices(vertices, indicator(mask, instance.n)).get_d();
  }
  return lp;
}

Rational product_lower_probability(const std::vector<FiniteCredalInstance>& marginals,
                                   const std::vector<bool>& event) {
  if (marginals.empty()) throw ValidationError("product space needs at least one factor");
  std::size_t size = 1;
  for (const auto& m : marginals) {
    m.validate();
    size *= m.n;
  }
  if (size > 64) throw ValidationError("product LP is limited to 64 points");
  if (event.size() != size) throw ValidationError("event length does not match the product space");
  LinearProgram lp;
  lp.num_vars = size;
  lp.cost.assign(size, 0);
  for (std::size_t x = 0; x < size; ++x) lp.cost[x] = event[x] ? 1 : 0;
  lp.add_row(std::vector<Rational>(size, 1), Sense::kEqual, 1);
  std::size_t stride = 1;
  for (const auto& m : marginals) {
    for (std::size_t k = 0; k + 1 < m.n; ++k) {
      std::vector<Rational> row(size, 0);
      for (std::size_t x = 0; x < size; ++x) {
        if ((x / stride) % m.n <= k) row[x] = 1;
      }
      lp.add_row(row, Sense::kGreaterEqual, Rational(m.lower_cum[k]));
      lp.add_row(std::move(row), Sense::kLessEqual, Rational(m.upper_cum[k]));
    }
    stride *= m.n;
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) throw ConsistencyError("product LP has no optimum");
  return sol.value;
}

FiniteLowerProbability product_natural_extension(const std::vector<FiniteCredalInstance>& marginals) {
  std::size_t size = 1;
  for (const auto& m : marginals) size *= m.n;
  if (size > 16) throw ValidationError("product lower probability table is limited to 16 points");
  FiniteLowerProbability lp;
  lp.n = size;
  lp.values.resize(std::size_t{1} << size);
  for (std::uint32_t mask = 0; mask < lp.values.size(); ++mask) {
    std::vector<bool> event(size);
    for (std::size_t x = 0; x < size; ++x) event[x] = mask >> x & 1u;
    lp.values[mask] = product_lower_probability(marginals, event).get_d();
  }
  return lp;
}

double envelope_sample_bound(const FiniteCredalInstance& instance, const std::vector<double>& gamble,
                             std::size_t samples, std::uint64_t seed) {
  instance.validate();
  if (samples == 0) throw ValidationError("envelope sampling needs at least one sample");
  if (gamble.size() != instance.n) throw ValidationError("gamble length does not match the space");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = instance.n;
  std::vector<double> u(n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& v : u) v = unif(rng);
    std::sort(u.begin(), u.end());
    double prev = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double f = k + 1 == n ? 1.0
                                  : std::clamp(std::max(u[k], prev), instance.lower_cum[k], instance.upper_cum[k]);
      total += (f - prev) * gamble[k];
      prev = f;
    }
    best = std::min(best, total);
  }
  return best;
}

MonotonicityReport complete_monotonicity_check(const FiniteLowerProbability& lp, std::size_t p_max,
                                               std::size_t max_reported) {
  lp.validate();
  if (p_max < 2) throw ValidationError("monotonicity order must be at least 2");
  if (lp.n > 5 || p_max > 4) throw ValidationError("monotonicity check is limited to n <= 5 and p <= 4");
  const std::uint32_t count = static_cast<std::uint32_t>(lp.values.size());
  MonotonicityReport report;
  std::vector<std::uint32_t> pick;
  for (std::size_t p = 2; p <= p_max; ++p) {
    if (p > count) break;
    pick.resize(p);
    std::iota(pick.begin(), pick.end(), 0u);
    while (true) {
      std::uint32_t all = 0;
      for (auto m : pick) all |= m;
      double rhs = 0.0;
      for (std::uint32_t sel = 1; sel < (1u << p); ++sel) {
        std::uint32_t inter = (1u << lp.n) - 1;
        int bits = 0;
        for (std::size_t i = 0; i < p; ++i) {
          if (sel >> i & 1u) {
            inter &= pick[i];
            ++bits;
          }
        }
        rhs += (bits % 2 ? 1.0 : -1.0) * lp.values[inter];
      }
      ++report.tuples_checked;
      if (lp.values[all] - rhs < -kMonotonicityTolerance) {
        report.passed = false;
        if (report.violations.size() < max_reported) report.violations.push_back({pick, lp.values[all], rhs});
      }
      // Next p-combination of distinct events.
      std::size_t i = p;
      while (i > 0 && pick[i - 1] == count - p + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < p; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return report;
}

RepresentabilityReport pbox_representability_check(const FiniteLowerProbability& lp,
                                                   const std::vector<std::size_t>& ordering, double tol) {
  lp.validate();
  const std::size_t n = lp.n;
  if (ordering.size() != n) throw ValidationError("ordering must list every class once");
  std::vector<bool> seen(n, false);
  for (auto c : ordering) {
    if (c >= n || seen[c]) throw ValidationError("ordering must list every class once");
    seen[c] = true;
  }
  const std::uint32_t full = static_cast<std::uint32_t>((std::size_t{1} << n) - 1);
  auto ranks_to_mask = [&](std::size_t first, std::size_t last) {
    std::uint32_t m = 0;
    for (std::size_t r = first; r <= last; ++r) m |= 1u << ordering[r];
    return m;
  };
  RepresentabilityReport report;
  report.lower_cum.resize(n);
  report.upper_cum.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t down = ranks_to_mask(0, k);
    report.lower_cum[k] = lp.values[down];
    report.upper_cum[k] = 1.0 - lp.values[full & ~down];
  }
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    std::uint32_t rank_mask = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (mask >> ordering[r] & 1u) rank_mask |= 1u << r;
    }
    double formula = 0.0;
    for (const auto& [first, last] : runs_of(rank_mask, n)) {
      const double before = first == 0 ? 0.0 : report.upper_cum[first - 1];
      formula += std::max(0.0, report.lower_cum[last] - before);
    }
    formula = std::min(formula, 1.0);
    if (std::abs(formula - lp.values[mask]) > tol) report.mismatches.push_back({mask, formula, lp.values[mask]});
  }
  return report;
}

AdditivityReport additivity_check(const FiniteCredalInstance& instance, std::size_t trials, std::uint64_t seed,
                                  double tol) {
  instance.validate();
  if (instance.n > kVertexEnumerationMax) throw ValidationError("additivity check is limited to 8 classes");
  const auto vertices = credal_vertices(instance);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>((1u << instance.n) - 1));
  AdditivityReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint32_t mask = pick(rng);
    const Rational whole = min_over_vertices(vertices, indicator(mask, instance.n));
    Rational parts = 0;
    for (const auto& [first, last] : runs_of(mask, instance.n)) {
      std::uint32_t run = 0;
      for (std::size_t i = first; i <= last; ++i) run |= 1u << i;
      parts += min_over_vertices(vertices, indicator(run, instance.n));
    }
    const double diff = std::abs(Rational(whole - parts).get_d());
    if (diff > tol) report.violations.push_back({mask, whole.get_d(), parts.get_d()});
  }
  return report;
}

PBox random_finite_pbox(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("random p-box needs at least one class");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const bool rounded = std::bernoulli_distribution(0.5)(rng);
  std::vector<double> a(n), b(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    a[k] = unif(rng);
    b[k] = unif(rng);
    if (rounded) {
      a[k] = std::round(a[k] * 20.0) / 20.0;
      b[k] = std::round(b[k] * 20.0) / 20.0;
    }
  }
  a[n - 1] = b[n - 1] = 1.0;
  std::sort(a.begin(), a.end() - 1);
  std::sort(b.begin(), b.end() - 1);
  std::vector<double> lower(n), upper(n);
  for (std::size_t k = 0; k < n; ++k) {
    lower[k] = std::min(a[k], b[k]);
    upper[k] = std::max(a[k], b[k]);
  }
  return PBox(FiniteQuotientSpace::with_size(n), Cdf::step(std::move(lower)), Cdf::step(std::move(upper)));
}

CampaignReport run_campaign(const CampaignConfig& config) {
  if (config.n_max < 1 || config.n_max > kVertexEnumerationMax) {
    throw ValidationError("campaign n_max must lie in [1, 8]");
  }
  CampaignReport report;
  std::size_t monotonicity_done = 0;
  char buf[256];
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    std::mt19937_64 rng(derive_seed(config.seed, trial));
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, config.n_max)(rng);
    const PBox box = random_finite_pbox(n, rng());
    const auto inst = FiniteCredalInstance::from_pbox(box);
    const auto vertices = credal_vertices(inst);
    const auto& space = box.finite_space();
    ++report.instances;

    std::uniform_int_distribution<std::uint32_t> pick_mask(0, static_cast<std::uint32_t>((1u << n) - 1));
    for (std::size_t e = 0; e < config.events_per_instance; ++e) {
      const std::uint32_t mask = pick_mask(rng);
      const auto subset = ClassSubset::from_mask(space, mask);
      double formula = lower_prob_event(box, subset);
      if (config.inject_fault && full_components_finite(space, subset).size() > 1) formula += 0.05;
      const double exact = min_over_vertices(vertices, indicator(mask, n)).get_d();
      const double err = std::abs(formula - exact);
      report.max_event_error = std::max(report.max_event_error, err);
      ++report.event_checks;
      if (err > config.tol) {
        std::snprintf(buf, sizeof buf, "instance %zu (n=%zu) subset %s: formula %.12g vs lp %.12g", trial, n,
                      mask_to_string(mask, n).c_str(), formula, exact);
        report.violations.emplace_back(buf);
      }
    }
    std::uniform_int_distribution<int> small(-5, 5);
    std::uniform_real_distribution<double> wide(-10.0, 10.0);
    for (std::size_t g = 0; g < config.gambles_per_instance; ++g) {
      std::vector<double> gamble(n);
      const bool ties = g % 2 == 0;
      for (auto& v : gamble) v = ties ? small(rng) : wide(rng);
      const double formula = lower_expectation_finite(box, gamble);
      const double exact = min_over_vertices(vertices, gamble).get_d();
      const double err = std::abs(formula - exact);
      report.max_gamble_error = std::max(report.max_gamble_error, err);
      ++report.gamble_checks;
      if (err > config.tol) {
        std::snprintf(buf, sizeof buf, "instance %zu (n=%zu) gamble %zu: formula %.12g vs lp %.12g", trial, n, g,
                      formula, exact);
        report.violations.emplace_back(buf);
      }
    }
    const auto additivity = additivity_check(inst, config.additivity_trials, rng(), config.tol);
    ++report.additivity_checks;
    for (const auto& v : additivity.violations) {
      std::snprintf(buf, sizeof buf, "instance %zu additivity at %s: %.12g vs %.12g", trial,
                    mask_to_string(v.subset, n).c_str(), v.whole, v.sum_of_components);
      report.violations.emplace_back(buf);
    }
    const auto extension = lp_natural_extension(inst);
    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), 0);
    const auto repr = pbox_representability_check(extension, identity, config.tol);
    ++report.representability_checks;
    for (const auto& m : repr.mismatches) {
      std::snprintf(buf, sizeof buf, "instance %zu representability at %s: %.12g vs %.12g", trial,
                    mask_to_string(m.subset, n).c_str(), m.formula, m.stored);
      report.violations.emplace_back(buf);
    }
    if (n <= 5 && monotonicity_done < config.monotonicity_instances) {
      ++monotonicity_done;
      ++report.monotonicity_checks;
      const auto mono = complete_monotonicity_check(extension, std::min<std::size_t>(4, std::size_t{1} << n), 1);
      if (!mono.passed) {
        std::string sets;
        for (auto s : mono.violations.front().sets) sets += mask_to_string(s, n);
        std::snprintf(buf, sizeof buf, "instance %zu monotonicity fails on %s", trial, sets.c_str());
        report.violations.emplace_back(buf);
      }
    }
  }
  return report;
}

}  // namespace pbox::oracle
