// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pbox/builtins.hpp"
#include "pbox/choquet.hpp"
#include "pbox/cli.hpp"
#include "pbox/multivariate.hpp"
#include "pbox/oracle.hpp"
#include "pbox/pbox.hpp"
#include "support.hpp"

using namespace pbox;
namespace oc = pbox::oracle;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const cli::Row* find_row(const std::vector<cli::Row>& rows, const std::string& id) {
  for (const auto& r : rows) {
    if (r.query_id == id) return &r;
  }
  return nullptr;
}

double row_value(const std::vector<cli::Row>& rows, const std::string& id, Check& c) {
  const auto* r = find_row(rows, id);
  c.require(r != nullptr, "missing row " + id);
  return r ? r->value : std::nan("");
}

int failures = 0;

void criterion(int number, const char* title, const std::function<Check()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!c.ok) ++failures;
  std::printf("%s criterion %d: %s (%.3f s)%s%s\n", c.ok ? "PASS" : "FAIL", number, title, secs,
              c.detail.empty() ? "" : " -- ", c.detail.c_str());
  std::fflush(stdout);
}

double timed_run(const std::vector<cli::Scenario>& scenarios, std::vector<cli::Row>& rows) {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& s : scenarios) {
    auto part = cli::run_scenario(s);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main() {
  criterion(1, "oscillator expectations 0.584 / 1.664 within 0.002, under 1 s", [] {
    Check c;
    std::vector<cli::Row> rows;
    const double secs = timed_run(cli::builtin_scenarios("oscillator"), rows);
    const double lo = row_value(rows, "E_lower(zeta)", c), up = row_value(rows, "E_upper(zeta)", c);
    c.require(std::abs(lo - 0.584) <= 0.002, fmt("lower %.6f", lo));
    c.require(std::abs(up - 1.664) <= 0.002, fmt("upper %.6f", up));
    c.require(secs < 1.0, fmt("runtime %.3f s", secs));
    c.detail += (c.detail.empty() ? "" : "; ") + fmt("lower=%.6f upper=%.6f", lo, up);
    return c;
  });

  std::vector<cli::Row> dike_rows;
  double dike_secs = 0.0;
  criterion(2, "dike expectations 1.515 / 6.423 within 0.01, under 2 s", [&] {
    Check c;
    dike_secs = timed_run(cli::builtin_scenarios("dike"), dike_rows);
    const double lo = row_value(dike_rows, "E_lower(h)", c), up = row_value(dike_rows, "E_upper(h)", c);
    c.require(std::abs(lo - 1.515) <= 0.01, fmt("lower %.6f", lo));
    c.require(std::abs(up - 6.423) <= 0.01, fmt("upper %.6f", up));
    c.require(dike_secs < 2.0, fmt("runtime %.3f s", dike_secs));
    c.detail += (c.detail.empty() ? "" : "; ") + fmt("lower=%.6f upper=%.6f", lo, up);
    return c;
  });

  criterion(3, "dike threshold at 0.01 is 10.725 within 0.01", [&] {
    Check c;
    const double t = row_value(dike_rows, "threshold(0.01)", c);
    c.require(std::abs(t - 10.725) <= 0.01, fmt("t %.6f", t));
    c.detail += (c.detail.empty() ? "" : "; ") + fmt("t=%.6f", t);
    return c;
  });

  criterion(4, "field event (0.5,0.6]: p-box 0 exactly, envelope of the two CDFs 0.1", [] {
    Check c;
    std::vector<cli::Row> rows;
    timed_run(cli::builtin_scenarios("example_field_nonunique"), rows);
    const double box = row_value(rows, "pbox:(0.5,0.6]", c);
    const double a = row_value(rows, "precise_lower_cdf:(0.5,0.6]", c);
    const double b = row_value(rows, "precise_upper_cdf:(0.5,0.6]", c);
    const double envelope = std::min(a, b);
    c.require(box == 0.0, fmt("p-box value %.17g", box));
    c.require(std::abs(envelope - 0.1) <= 1e-12, fmt("envelope %.17g", envelope));
    c.require(envelope != box, "values not distinguished");
    c.detail += (c.detail.empty() ? "" : "; ") + fmt("pbox=%.3g envelope=%.3g", box, envelope);
    return c;
  });

  criterion(5, "two orderings: all 32 subsets", [] {
    Check c;
    std::vector<cli::Row> rows;
    timed_run(cli::builtin_scenarios("example_ordering"), rows);
    int checked = 0;
    for (int variant = 1; variant <= 2; ++variant) {
      for (unsigned mask = 0; mask < 32; ++mask) {
        std::string label = "{";
        bool first = true;
        for (int i = 0; i < 5; ++i) {
          if (!(mask >> i & 1u)) continue;
          label += (first ? "" : ",") + std::to_string(i);
          first = false;
        }
        const std::string id = "order" + std::to_string(variant) + ":" + label + "}";
        const double v = row_value(rows, id, c);
        const bool sure = variant == 1 ? (mask & 0b11100u) == 0b11100u : (mask & 0b00100u) != 0;
        c.require(v == (sure ? 1.0 : 0.0), id + " = " + fmt("%.17g", v));
        ++checked;
      }
    }
    c.require(checked == 64, "expected 64 rows");
    return c;
  });

  criterion(6, "Frechet joint values 0.4, 0.7, 0.7, 0.1 and the (A,B) 2-monotonicity violation", [] {
    Check c;
    std::vector<cli::Row> rows;
    timed_run(cli::builtin_scenarios("example_frechet_62"), rows);
    const double want[] = {0.4, 0.7, 0.7, 0.1};
    const char* ids[] = {"P_lower(A)", "P_lower(B)", "P_lower(A|B)", "P_lower(A&B)"};
    for (int i = 0; i < 4; ++i) {
      const double v = row_value(rows, ids[i], c);
      c.require(std::abs(v - want[i]) <= 1e-15, std::string(ids[i]) + fmt(" = %.17g", v));
    }
    // exact rational values from the product-space LP; points ordered
    // (x1,y1), (x2,y1), (x1,y2), (x2,y2)
    oc::FiniteCredalInstance x{2, {0.4, 1.0}, {0.6, 1.0}}, y{2, {0.2, 1.0}, {0.3, 1.0}};
    const std::vector<oc::FiniteCredalInstance> m = {x, y};
    const std::vector<bool> a = {true, false, true, false}, b = {false, false, true, true};
    const std::vector<bool> a_or_b = {true, false, true, true}, a_and_b = {false, false, true, false};
    // the inputs are binary doubles, so the rational optimum can differ from
    // the decimal by their representation error only
    auto near_exact = [](const oc::Rational& got, const oc::Rational& want) {
      const oc::Rational diff = abs(got - want);
      return diff <= oc::Rational(1, 1000000000000000);
    };
    c.require(near_exact(oc::product_lower_probability(m, a), oc::Rational(2, 5)), "LP P(A)");
    c.require(near_exact(oc::product_lower_probability(m, b), oc::Rational(7, 10)), "LP P(B)");
    c.require(near_exact(oc::product_lower_probability(m, a_or_b), oc::Rational(7, 10)), "LP P(A|B)");
    c.require(near_exact(oc::product_lower_probability(m, a_and_b), oc::Rational(1, 10)), "LP P(A&B)");
    const auto report = oc::complete_monotonicity_check(oc::product_natural_extension(m), 2, 1000);
    bool flagged = false;
    for (const auto& v : report.violations) {
      flagged = flagged || v.sets == std::vector<std::uint32_t>{0b0101, 0b1100} ||
                v.sets == std::vector<std::uint32_t>{0b1100, 0b0101};
    }
    c.require(flagged, "pair (A,B) not flagged");
    return c;
  });

  criterion(7, "independent joint: 0.58 and 0.2 by factorization, joint p-box <= 0.2", [] {
    Check c;
    std::vector<cli::Row> rows;
    timed_run(cli::builtin_scenarios("example_independent_63"), rows);
    const double u = row_value(rows, "P_lower(A|B)", c), i = row_value(rows, "P_lower(A&B)", c);
    const double joint = row_value(rows, "joint_pbox(A&B)", c);
    c.require(std::abs(u - 0.58) <= 1e-15, fmt("union %.17g", u));
    c.require(std::abs(i - 0.2) <= 1e-15, fmt("intersection %.17g", i));
    c.require(joint <= 0.2 + 1e-12, fmt("joint %.17g", joint));
    c.detail += (c.detail.empty() ? "" : "; ") + fmt("union=%.6g intersection=%.6g joint=%.6g", u, i, joint);
    return c;
  });

  criterion(8, "oracle campaign: 200 p-boxes, n <= 6, 10 events + 5 gambles each, within 1e-9, under 30 s", [] {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    oc::CampaignConfig cfg;
    const auto report = oc::run_campaign(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(report.instances == 200, "instances");
    c.require(report.event_checks == 2000 && report.gamble_checks == 1000, "check counts");
    c.require(report.max_event_error <= 1e-9 && report.max_gamble_error <= 1e-9, "errors");
    c.require(report.passed(), report.violations.empty() ? "" : report.violations.front());
    c.require(secs < 30.0, fmt("runtime %.3f s", secs));
    c.detail += (c.detail.empty() ? "" : "; ") +
                fmt("max event error %.2g, max gamble error %.2g", report.max_event_error, report.max_gamble_error);
    return c;
  });

  criterion(9, "complete monotonicity on 50 p-boxes (p <= 4) and the non-representable envelope", [] {
    Check c;
    std::mt19937_64 rng(909);
    std::uniform_int_distribution<std::size_t> size(2, 5);
    std::size_t passed = 0;
    for (int k = 0; k < 50; ++k) {
      const auto ext = oc::lp_natural_extension(
          oc::FiniteCredalInstance::from_pbox(oc::random_finite_pbox(size(rng), rng())));
      const auto report = oc::complete_monotonicity_check(ext, 4);
      if (report.passed) ++passed;
    }
    c.require(passed == 50, fmt("%.0f of 50 passed", double(passed)));
    const auto env = oc::FiniteLowerProbability::envelope({{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}});
    const auto repr = oc::pbox_representability_check(env, {0, 1, 2});
    bool found = false;
    for (const auto& m : repr.mismatches) {
      if (m.subset == 0b010) {
        found = std::abs(m.formula) <= 1e-12 && std::abs(m.stored - 0.1) <= 1e-12;
        c.detail += (c.detail.empty() ? "" : "; ") + fmt("middle singleton: formula %.3g vs stored %.3g", m.formula, m.stored);
      }
    }
    c.require(found, "mismatch at the middle singleton not reported");
    return c;
  });

  criterion(10, "probabilistic arithmetic: uniform sum on 1001 points, 20 random pairs vs 1e5-point grid", [] {
    Check c;
    const auto u = RealLinePBox::precise(RealLineCdf::piecewise_linear({{0, 0}, {1, 1}}));
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double y = 2.0 * i / 1000.0;
      worst = std::max(worst, std::abs(prob_arith_add_lower(u, u, y) - std::max(0.0, y - 1.0)));
    }
    c.require(worst <= 1e-9, fmt("uniform sum error %.3g", worst));
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const ArithOp ops[] = {ArithOp::kAdd, ArithOp::kSubtract, ArithOp::kMultiply, ArithOp::kDivide};
    const char* names[] = {"add", "subtract", "multiply", "divide"};
    double grid_worst = 0.0;
    for (int pair = 0; pair < 20; ++pair) {
      const double lo1 = 0.2 + unit(rng), lo2 = 0.2 + unit(rng);
      const auto p1 = testsupport::random_linear_pair(rng, lo1, lo1 + 0.5 + 2.0 * unit(rng), 3 + pair % 5);
      const auto p2 = testsupport::random_linear_pair(rng, lo2, lo2 + 0.5 + 2.0 * unit(rng), 3 + (pair + 2) % 5);
      const auto b1 = p1.box(), b2 = p2.box();
      for (int o = 0; o < 4; ++o) {
        double ylo, yhi;
        switch (ops[o]) {
          case ArithOp::kAdd: ylo = b1.support_lo() + b2.support_lo(); yhi = b1.support_hi() + b2.support_hi(); break;
          case ArithOp::kSubtract: ylo = b1.support_lo() - b2.support_hi(); yhi = b1.support_hi() - b2.support_lo(); break;
          case ArithOp::kMultiply: ylo = b1.support_lo() * b2.support_lo(); yhi = b1.support_hi() * b2.support_hi(); break;
          default: ylo = b1.support_lo() / b2.support_hi(); yhi = b1.support_hi() / b2.support_lo(); break;
        }
        for (int k = 0; k < 4; ++k) {
          const double y = ylo + (yhi - ylo) * (k + unit(rng)) / 4.0;
          const auto got = prob_arith_transform(ops[o], b1, b2, y);
          const auto want = testsupport::fine_grid_bounds(ops[o], p1, p2, y);
          const double err = std::max(std::abs(got.first - want.first), std::abs(got.second - want.second));
          grid_worst = std::max(grid_worst, err);
          c.require(err <= 1e-6, std::string(names[o]) + fmt(" pair %.0f y=%.6g error %.3g", pair, y, err));
        }
      }
    }
    c.detail += (c.detail.empty() ? "" : "; ") + fmt("uniform error %.2g, fine-grid error %.2g", worst, grid_worst);
    return c;
  });

  criterion(11, "Darboux bracket contains the value at 4x the refinement budget", [] {
    Check c;
    auto contains = [&](const QuadratureResult& base, const QuadratureResult& fine, const std::string& what) {
      const double slack = 1e-9;
      c.require(base.lower - slack <= fine.value && fine.value <= base.upper + slack,
                what + fmt(" [%.10g, %.10g] misses %.10g", base.lower, base.upper, fine.value));
    };
    QuadratureConfig base, fine;
    base.abs_tol = fine.abs_tol = 1e-12;
    base.max_refinements = 2;
    fine.max_refinements = 8;
    std::mt19937_64 rng(1111);
    for (int k = 0; k < 20; ++k) {
      const auto pc = testsupport::random_analytic_case(rng);
      const auto& f = pc.lower_side ? lower_expectation : upper_expectation;
      contains(f(pc.box, pc.osc, base), f(pc.box, pc.osc, fine), "case " + std::to_string(k) + " " + pc.osc.name);
    }
    // the scenario runs
    base.max_refinements = 3;
    fine.max_refinements = 12;
    contains(lower_expectation(builtins::oscillator_pbox(), builtins::oscillator_lower(), base),
             lower_expectation(builtins::oscillator_pbox(), builtins::oscillator_lower(), fine), "oscillator lower");
    contains(upper_expectation(builtins::oscillator_pbox(), builtins::oscillator_upper(), base),
             upper_expectation(builtins::oscillator_pbox(), builtins::oscillator_upper(), fine), "oscillator upper");
    contains(lower_expectation(builtins::dike_pbox(), builtins::dike_lower(), base),
             lower_expectation(builtins::dike_pbox(), builtins::dike_lower(), fine), "dike lower");
    contains(upper_expectation(builtins::dike_pbox(), builtins::dike_upper(), base),
             upper_expectation(builtins::dike_pbox(), builtins::dike_upper(), fine), "dike upper");
    // and at the default tolerance against a 4x larger budget
    QuadratureConfig deflt, big;
    big.abs_tol = deflt.abs_tol / 4.0;
    contains(lower_expectation(builtins::dike_pbox(), builtins::dike_lower(), deflt),
             lower_expectation(builtins::dike_pbox(), builtins::dike_lower(), big), "dike lower default");
    contains(upper_expectation(builtins::oscillator_pbox(), builtins::oscillator_upper(), deflt),
             upper_expectation(builtins::oscillator_pbox(), builtins::oscillator_upper(), big), "oscillator upper default");
    return c;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
