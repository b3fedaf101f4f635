#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include <CLI11.hpp>

#include "pbox/builtins.hpp"
#include "pbox/cli.hpp"
#include "pbox/error.hpp"
#include "pbox/oracle.hpp"

namespace pbox::cli {
namespace {

const PBox& require_pbox(const Scenario& s) {
  if (!s.pbox) throw ValidationError("scenario has no p-box");
  return *s.pbox;
}

const ElementSpace& require_space(const Scenario& s) {
  if (!s.space) throw ValidationError("query needs a finite space");
  return *s.space;
}

const Oscillation& require_oscillation(const Scenario& s, const std::string& name) {
  auto it = s.oscillations.find(name);
  if (it == s.oscillations.end()) throw ValidationError("unknown oscillation '" + name + "'");
  return it->second;
}

const RealLinePBox& require_variable(const Scenario& s, const std::string& name) {
  auto it = s.variables.find(name);
  if (it == s.variables.end()) throw ValidationError("unknown variable '" + name + "'");
  return it->second;
}

// Classes whose elements all lie in the set (interior) or that meet it (closure).
ClassSubset classes_of_elements(const ElementSpace& space, const std::vector<std::size_t>& elements, bool closure) {
  const std::size_t n = space.quotient.size();
  std::vector<int> inside(n, 0);
  std::vector<int> total(n, 0);
  std::vector<bool> chosen(space.elements.size(), false);
  for (auto e : elements) {
    if (e >= space.elements.size()) throw ValidationError("element index out of range");
    chosen[e] = true;
  }
  for (std::size_t e = 0; e < space.elements.size(); ++e) {
    ++total[space.class_of[e]];
    if (chosen[e]) ++inside[space.class_of[e]];
  }
  std::vector<std::size_t> members;
  for (std::size_t c = 0; c < n; ++c) {
    if (closure ? inside[c] > 0 : inside[c] == total[c]) members.push_back(c);
  }
  return ClassSubset(space.quotient, std::move(members));
}

// Complement of the field set (x0,x1] u ... inside (sentinel, top].
std::vector<double> field_complement(const std::vector<double>& endpoints, double top) {
  std::vector<double> out;
  if (endpoints.front() != kBottomSentinel) {
    out.push_back(kBottomSentinel);
    out.push_back(endpoints.front());
  }
  for (std::size_t k = 1; k + 1 < endpoints.size(); k += 2) {
    out.push_back(endpoints[k]);
    out.push_back(endpoints[k + 1]);
  }
  if (endpoints.back() < top) {
    out.push_back(endpoints.back());
    out.push_back(top);
  }
  return out;
}

std::vector<PBox> marginal_pboxes(const Scenario& s) {
  if (!s.rule || s.marginals.empty()) throw ValidationError("product events need marginals and a rule");
  std::vector<PBox> out;
  for (const auto& m : s.marginals) {
    if (!m.is_finite()) throw ValidationError("product events need finite marginals");
    out.emplace_back(FiniteQuotientSpace::with_size(m.levels.size()), m.lower, m.upper);
  }
  return out;
}

double product_value(const Scenario& s, const Query& q, bool upper) {
  const auto boxes = marginal_pboxes(s);
  const auto& sets = *q.product;
  if (sets.size() != boxes.size()) throw ValidationError("product event needs one class set per marginal");
  std::vector<double> lows, ups;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const ClassSubset a(boxes[i].finite_space(), sets[i]);
    lows.push_back(lower_prob_event(boxes[i], a));
    ups.push_back(upper_prob_event(boxes[i], a.complement()));
  }
  // The complement of a product event flips lower and upper.
  if (q.complement) return upper ? 1.0 - product_event_lower(*s.rule, lows) : 1.0 - product_event_upper(*s.rule, ups);
  return upper ? product_event_upper(*s.rule, ups) : product_event_lower(*s.rule, lows);
}

double event_value(const Scenario& s, const Query& q, bool upper) {
  if (q.product) return product_value(s, q, upper);
  const PBox& box = require_pbox(s);
  if (q.z_image) {
    if (box.is_finite()) throw ValidationError("z-intervals need a continuum p-box");
    return upper ? upper_prob_event(box, complement_z(*q.z_image)) : lower_prob_event(box, *q.z_image);
  }
  if (q.field) {
    if (q.field->empty()) return 0.0;
    if (!upper) return lower_prob_field(box, *q.field);
    const double top = box.is_finite() ? static_cast<double>(box.finite_space().size() - 1) : 1.0;
    const auto comp = field_complement(*q.field, top);
    return comp.empty() ? 1.0 : 1.0 - lower_prob_field(box, comp);
  }
  if (q.classes) {
    const ClassSubset a(box.finite_space(), *q.classes);
    return upper ? upper_prob_event(box, a.complement()) : lower_prob_event(box, a);
  }
  const auto& space = require_space(s);
  const ClassSubset a = classes_of_elements(space, *q.elements, upper);
  return upper ? upper_prob_event(box, a.complement()) : lower_prob_event(box, a);
}

std::vector<double> class_oscillation(const ElementSpace& space, const std::vector<double>& gamble, bool upper) {
  if (gamble.size() != space.elements.size()) throw ValidationError("gamble needs one value per element");
  std::vector<double> osc(space.quotient.size(), upper ? -std::numeric_limits<double>::infinity()
                                                       : std::numeric_limits<double>::infinity());
  for (std::size_t e = 0; e < gamble.size(); ++e) {
    double& v = osc[space.class_of[e]];
    v = upper ? std::max(v, gamble[e]) : std::min(v, gamble[e]);
  }
  return osc;
}

std::string format_y(double y) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", y);
  return buf;
}

}  // namespace

std::string to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::kEventLower: return "event_lower";
    case QueryKind::kEventUpper: return "event_upper";
    case QueryKind::kExpectationLower: return "expectation_lower";
    case QueryKind::kExpectationUpper: return "expectation_upper";
    case QueryKind::kThreshold: return "threshold";
    case QueryKind::kArithAdd: return "arith_add";
    case QueryKind::kArithOp: return "arith_op";
  }
  return "unknown";
}

QuadratureConfig effective_config(const Scenario& scenario, const RunOptions& options) {
  QuadratureConfig cfg = scenario.config;
  if (options.abs_tol) cfg.abs_tol = *options.abs_tol;
  if (options.tail_tol) cfg.tail_tol = *options.tail_tol;
  if (options.max_refinements) cfg.max_refinements = *options.max_refinements;
  validate(cfg);
  return cfg;
}

std::vector<Row> run_scenario(const Scenario& scenario, const RunOptions& options) {
  const QuadratureConfig cfg = effective_config(scenario, options);
  std::vector<Row> rows;
  for (const auto& q : scenario.queries) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Row> produced;
    Row row;
    row.query_id = q.id;
    row.kind = to_string(q.kind);
    switch (q.kind) {
      case QueryKind::kEventLower:
      case QueryKind::kEventUpper:
        row.value = event_value(scenario, q, q.kind == QueryKind::kEventUpper);
        row.lower = row.upper = row.value;
        produced.push_back(row);
        break;
      case QueryKind::kExpectationLower:
      case QueryKind::kExpectationUpper: {
        const bool upper = q.kind == QueryKind::kExpectationUpper;
        const PBox& box = require_pbox(scenario);
        if (q.gamble) {
          const auto osc = class_oscillation(require_space(scenario), *q.gamble, upper);
          row.value = upper ? upper_expectation_finite(box, osc) : lower_expectation_finite(box, osc);
          row.lower = row.upper = row.value;
        } else {
          const auto& osc = require_oscillation(scenario, q.oscillation);
          const auto r = upper ? upper_expectation(box, osc, cfg) : lower_expectation(box, osc, cfg);
          row.value = r.value;
          row.error_bound = r.error_bound;
          row.flagged = !r.converged;
          row.lower = r.lower;
          row.upper = r.upper;
        }
        produced.push_back(row);
        break;
      }
      case QueryKind::kThreshold: {
        const auto& osc = require_oscillation(scenario, q.oscillation);
        row.value = threshold_solve(require_pbox(scenario), osc, q.target, cfg);
        row.error_bound = std::isfinite(row.value) ? cfg.bisect_tol * std::max(1.0, std::abs(row.value)) : 0.0;
        row.lower = row.value - row.error_bound;
        row.upper = row.value;
        produced.push_back(row);
        break;
      }
      case QueryKind::kArithAdd:
      case QueryKind::kArithOp: {
        const auto& x1 = require_variable(scenario, q.x1);
        const auto& x2 = require_variable(scenario, q.x2);
        for (double y : q.ys) {
          const auto [lo, hi] = prob_arith_transform(q.op, x1, x2, y);
          Row a = row;
          a.query_id = q.id + "@" + format_y(y);
          a.kind = row.kind + ".lower";
          a.value = a.lower = a.upper = lo;
          produced.push_back(a);
          Row b = row;
          b.query_id = a.query_id;
          b.kind = row.kind + ".upper";
          b.value = b.lower = b.upper = hi;
          produced.push_back(b);
        }
        break;
      }
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : produced) {
      r.elapsed_ms = options.timing ? ms / static_cast<double>(produced.size()) : 0.0;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<Row>& rows, bool header) {
  if (header) out << kCsvHeader << '\n';
  char buf[128];
  for (const auto& r : rows) {
    // Ids may contain commas; quote them as CSV fields.
    std::string id = r.query_id;
    if (id.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : id) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      id = quoted + "\"";
    }
    std::snprintf(buf, sizeof buf, ",%.12g,%.12g%s,%.3f", r.value, r.error_bound, r.flagged ? "*" : "",
                  r.elapsed_ms);
    out << id << ',' << r.kind << buf << '\n';
  }
}

void write_table(std::ostream& out, const Scenario& scenario, TableKind what, std::size_t grid,
                 const std::string& oscillation, std::optional<double> t_max, const RunOptions& options) {
  const PBox& box = require_pbox(scenario);
  char buf[160];
  if (what == TableKind::kCdf) {
    if (box.is_finite()) {
      out << "class,lower,upper\n";
      const auto& space = box.finite_space();
      for (std::size_t c = 0; c < space.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g", box.lower().eval(static_cast<double>(c)),
                      box.upper().eval(static_cast<double>(c)));
        out << space.label(c) << ',' << buf << '\n';
      }
      return;
    }
    if (grid < 2) throw ValidationError("table grid needs at least 2 points");
    out << "z,lower,upper\n";
    for (std::size_t i = 0; i < grid; ++i) {
      const double z = static_cast<double>(i) / static_cast<double>(grid - 1);
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", z, box.lower().eval(z), box.upper().eval(z));
      out << buf;
    }
    return;
  }
  if (box.is_finite()) throw ValidationError("integrand tables need a continuum p-box");
  if (grid < 2) throw ValidationError("table grid needs at least 2 points");
  std::string name = oscillation;
  if (name.empty()) {
    if (scenario.oscillations.count("uosc")) {
      name = "uosc";
    } else if (!scenario.oscillations.empty()) {
      name = scenario.oscillations.begin()->first;
    } else {
      throw ValidationError("scenario has no oscillation to tabulate");
    }
  }
  const auto& osc = require_oscillation(scenario, name);
  const QuadratureConfig cfg = effective_config(scenario, options);
  const double lo = osc.inf_value;
  double hi = osc.sup_value;
  if (t_max) {
    hi = *t_max;
  } else if (!std::isfinite(hi)) {
    // Extend until the upper integrand has fallen below tail_tol.
    double step = std::max(1.0, std::abs(lo));
    hi = lo + step;
    for (int i = 0; i < 64 && upper_cut_probability(box, osc, hi, cfg) >= cfg.tail_tol; ++i) {
      step *= 2.0;
      hi = lo + step;
    }
  }
  if (!(hi >= lo)) throw ValidationError("t_max lies below the oscillation infimum");
  out << "t,lower_cut,upper_cut\n";
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", t, lower_cut_probability(box, osc, t, cfg),
                  upper_cut_probability(box, osc, t, cfg));
    out << buf;
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
#ifndef NDEBUG
  builtins::check_constants();
#endif
  CLI::App app{"Natural extension of p-boxes on totally preordered spaces", "pbox"};
  app.require_subcommand(1);
  RunOptions options;
  double tol = 0.0, tail_tol = 0.0;
  int max_refine = 0;
  bool no_timing = false;
  auto add_quadrature_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", tol, "target half-width of the quadrature bracket (default 1e-4)");
    sub->add_option("--tail-tol", tail_tol, "tail truncation level for unbounded oscillations (default 1e-8)");
    sub->add_option("--max-refine", max_refine, "maximum number of grid doublings (default 24)");
    sub->add_flag("--no-timing", no_timing, "print 0 in the elapsed_ms column");
  };

  std::string file;
  auto* infer = app.add_subcommand("infer", "evaluate the queries of a scenario file");
  infer->add_option("file", file, "scenario file")->required();
  add_quadrature_flags(infer);

  std::uint64_t seed = 42;
  std::size_t trials = 200, n_max = 6;
  bool inject_fault = false;
  auto* verify = app.add_subcommand("verify", "run the oracle campaign");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--trials", trials, "number of random p-boxes");
  verify->add_option("--n-max", n_max, "largest number of classes (at most 8)");
  verify->add_flag("--inject-fault", inject_fault, "corrupt the event formula to exercise failure reporting");

  std::string what = "cdf", oscillation;
  std::size_t grid = 11;
  double t_max = 0.0;
  auto* table = app.add_subcommand("table", "tabulate CDFs or Choquet integrands");
  table->add_option("file", file, "scenario file or builtin name")->required();
  table->add_option("--what", what, "cdf or integrand")->check(CLI::IsMember({"cdf", "integrand"}));
  table->add_option("--grid", grid, "number of grid points");
  table->add_option("--oscillation", oscillation, "oscillation for integrand tables");
  auto* t_max_opt = table->add_option("--t-max", t_max, "upper end of the t-grid");
  add_quadrature_flags(table);

  std::string name;
  auto* paper = app.add_subcommand("paper", "run a builtin case study or example");
  paper->add_option("name", name, "builtin name")->required();
  add_quadrature_flags(paper);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  auto* used = app.get_subcommands().front();
  auto given = [used](const char* flag) {
    const auto* opt = used->get_option_no_throw(flag);
    return opt && opt->count() > 0;
  };
  if (given("--tol")) options.abs_tol = tol;
  if (given("--tail-tol")) options.tail_tol = tail_tol;
  if (given("--max-refine")) options.max_refinements = max_refine;
  options.timing = !no_timing;

  try {
    if (infer->parsed()) {
      write_csv(out, run_scenario(load_scenario(file), options));
      return 0;
    }
    if (paper->parsed()) {
      out << kCsvHeader << '\n';
      for (const auto& s : builtin_scenarios(name)) write_csv(out, run_scenario(s, options), false);
      return 0;
    }
    if (table->parsed()) {
      const auto names = builtin_names();
      const Scenario s = std::find(names.begin(), names.end(), file) != names.end() ? builtin_scenarios(file).front()
                                                                                    : load_scenario(file);
      std::optional<double> tm;
      if (t_max_opt->count()) tm = t_max;
      write_table(out, s, what == "cdf" ? TableKind::kCdf : TableKind::kIntegrand, grid, oscillation, tm, options);
      return 0;
    }
    if (verify->parsed()) {
      oracle::CampaignConfig cfg;
      cfg.seed = seed;
      cfg.trials = trials;
      cfg.n_max = n_max;
      cfg.inject_fault = inject_fault;
      const auto report = oracle::run_campaign(cfg);
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "instances=%zu events=%zu gambles=%zu monotonicity=%zu additivity=%zu representability=%zu "
                    "max_event_error=%.3g max_gamble_error=%.3g violations=%zu\n",
                    report.instances, report.event_checks, report.gamble_checks, report.monotonicity_checks,
                    report.additivity_checks, report.representability_checks, report.max_event_error,
                    report.max_gamble_error, report.violations.size());
      out << buf;
      for (const auto& v : report.violations) out << "violation: " << v << '\n';
      out << (report.passed() ? "PASS" : "FAIL") << '\n';
      return report.passed() ? 0 : 1;
    }
  } catch (const ParseError& e) {
    if (e.line() > 0) {
      err << "parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << '\n';
    } else {
      err << "parse error: " << e.what() << '\n';
    }
    return 2;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const ConsistencyError& e) {
    err << "internal consistency error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  return main_entry(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace pbox::cli
