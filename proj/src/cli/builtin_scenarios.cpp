#include <cmath>
#include <cstdio>

#include "pbox/builtins.hpp"
#include "pbox/cli.hpp"
#include "pbox/error.hpp"

namespace pbox::cli {
namespace {

Query expectation(std::string id, QueryKind kind, std::string oscillation) {
  Query q;
  q.id = std::move(id);
  q.kind = kind;
  q.oscillation = std::move(oscillation);
  return q;
}

Query z_event(std::string id, ZEventSet image) {
  Query q;
  q.id = std::move(id);
  q.kind = QueryKind::kEventLower;
  q.z_image = std::move(image);
  return q;
}

Query product_event(std::string id, QueryKind kind, std::vector<std::vector<std::size_t>> sets, bool complement) {
  Query q;
  q.id = std::move(id);
  q.kind = kind;
  q.product = std::move(sets);
  q.complement = complement;
  return q;
}

Scenario oscillator() {
  Scenario s;
  s.name = "oscillator";
  s.marginals = builtins::oscillator_marginals();
  s.rule = CombinationRule::independence();
  s.pbox = builtins::oscillator_pbox();
  s.oscillations.emplace("losc", builtins::oscillator_lower());
  s.oscillations.emplace("uosc", builtins::oscillator_upper());
  s.queries.push_back(expectation("E_lower(zeta)", QueryKind::kExpectationLower, "losc"));
  s.queries.push_back(expectation("E_upper(zeta)", QueryKind::kExpectationUpper, "uosc"));
  return s;
}

Scenario dike() {
  Scenario s;
  s.name = "dike";
  s.marginals = builtins::dike_marginals();
  s.rule = CombinationRule::frechet();
  s.pbox = builtins::dike_pbox();
  s.oscillations.emplace("losc", builtins::dike_lower());
  s.oscillations.emplace("uosc", builtins::dike_upper());
  s.queries.push_back(expectation("E_lower(h)", QueryKind::kExpectationLower, "losc"));
  s.queries.push_back(expectation("E_upper(h)", QueryKind::kExpectationUpper, "uosc"));
  Query t = expectation("threshold(0.01)", QueryKind::kThreshold, "uosc");
  t.target = 0.01;
  s.queries.push_back(t);
  return s;
}

// Same precise CDF, two preorders on {0,...,4}; one query per subset.
std::vector<Scenario> ordering() {
  std::vector<Scenario> out;
  const std::vector<std::string> elements = {"0", "1", "2", "3", "4"};
  for (int variant = 1; variant <= 2; ++variant) {
    Scenario s;
    s.name = "order" + std::to_string(variant);
    ElementSpace space = variant == 1
                             ? ElementSpace{elements, {0, 0, 1, 1, 1}, FiniteQuotientSpace({"{0,1}", "{2,3,4}"})}
                             : ElementSpace{elements, {0, 1, 2, 3, 4}, FiniteQuotientSpace(elements)};
    const std::vector<double> cdf =
        variant == 1 ? std::vector<double>{0.0, 1.0} : std::vector<double>{0.0, 0.0, 1.0, 1.0, 1.0};
    s.pbox = PBox(space.quotient, Cdf::step(cdf), Cdf::step(cdf));
    s.space = std::move(space);
    for (unsigned mask = 0; mask < 32; ++mask) {
      Query q;
      q.kind = QueryKind::kEventLower;
      std::vector<std::size_t> members;
      std::string label = "{";
      for (std::size_t i = 0; i < 5; ++i) {
        if (!(mask >> i & 1u)) continue;
        label += (members.empty() ? "" : ",") + std::to_string(i);
        members.push_back(i);
      }
      q.id = s.name + ":" + label + "}";
      q.elements = std::move(members);
      s.queries.push_back(std::move(q));
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Upper CDF z, lower CDF 0 below 0.5 and 2(z-0.5) above; the event (0.5,0.6]
// under the p-box and under each of its two bounding precise models.
std::vector<Scenario> field_nonunique() {
  const Cdf upper = Cdf::piecewise_linear({{0.0, 0.0}, {1.0, 1.0}});
  const Cdf lower = Cdf::piecewise_linear({{0.0, 0.0}, {0.5, 0.0}, {1.0, 1.0}});
  std::vector<Scenario> out;
  auto make = [&](std::string name, const Cdf& lo, const Cdf& hi) {
    Scenario s;
    s.name = name;
    s.pbox = PBox(lo, hi);
    Query q;
    q.id = name + ":(0.5,0.6]";
    q.kind = QueryKind::kEventLower;
    q.field = std::vector<double>{0.5, 0.6};
    s.queries.push_back(q);
    out.push_back(std::move(s));
  };
  make("pbox", lower, upper);
  make("precise_lower_cdf", lower, lower);
  make("precise_upper_cdf", upper, upper);
  return out;
}

// Two binary factors at z-levels 0.5 and 1, combined by `rule`.
Scenario two_by_two(std::string name, CombinationRule rule, std::vector<double> lower_y, std::vector<double> upper_y) {
  Scenario s;
  s.name = std::move(name);
  s.marginals = {MarginalSpec::finite("X", {0.5, 1.0}, {0.4, 1.0}, {0.6, 1.0}),
                 MarginalSpec::finite("Y", {0.5, 1.0}, std::move(lower_y), std::move(upper_y))};
  s.rule = rule;
  s.pbox = combine(s.marginals, rule);
  s.space = ElementSpace{{"(x1,y1)", "(x2,y1)", "(x1,y2)", "(x2,y2)"}, {0, 1, 1, 1}, s.pbox->finite_space()};
  return s;
}

Scenario frechet_62() {
  Scenario s = two_by_two("frechet_62", CombinationRule::frechet(), {0.2, 1.0}, {0.3, 1.0});
  s.queries.push_back(product_event("P_lower(A)", QueryKind::kEventLower, {{0}, {0, 1}}, false));
  s.queries.push_back(product_event("P_lower(B)", QueryKind::kEventLower, {{0, 1}, {1}}, false));
  s.queries.push_back(product_event("P_lower(A|B)", QueryKind::kEventLower, {{1}, {0}}, true));
  s.queries.push_back(product_event("P_lower(A&B)", QueryKind::kEventLower, {{0}, {1}}, false));
  return s;
}

Scenario independent_63() {
  Scenario s = two_by_two("independent_63", CombinationRule::independence(), {0.3, 1.0}, {0.5, 1.0});
  s.queries.push_back(product_event("P_lower(A)", QueryKind::kEventLower, {{0}, {0, 1}}, false));
  s.queries.push_back(product_event("P_lower(A|B)", QueryKind::kEventLower, {{1}, {1}}, true));
  s.queries.push_back(product_event("P_lower(A&B)", QueryKind::kEventLower, {{0}, {1}}, false));
  Query joint;
  joint.id = "joint_pbox(A&B)";
  joint.kind = QueryKind::kEventLower;
  joint.elements = std::vector<std::size_t>{2};
  s.queries.push_back(joint);
  return s;
}

Scenario diagonal_46() {
  Scenario s;
  s.name = "diagonal_46";
  s.pbox = PBox(Cdf::analytic("z^2", [](double z) { return z * z; }),
                Cdf::analytic("sqrt(z)", [](double z) { return std::sqrt(z); }));
  auto rect = [&](double a, double b, double c, double d) {
    char id[96];
    std::snprintf(id, sizeof id, "[%g,%g]x[%g,%g]", a, b, c, d);
    s.queries.push_back(z_event(id, builtins::diagonal_rectangle_interior(a, b, c, d)));
  };
  rect(0.0, 0.6, 0.0, 0.8);
  rect(0.2, 0.7, 0.1, 0.9);
  rect(0.2, 1.0, 0.4, 1.0);
  rect(0.0, 1.0, 0.0, 1.0);
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"oscillator",         "dike",        "example_ordering",      "example_field_nonunique",
          "example_frechet_62", "example_independent_63", "example_diagonal_46"};
}

std::vector<Scenario> builtin_scenarios(const std::string& name) {
  if (name == "oscillator") return {oscillator()};
  if (name == "dike") return {dike()};
  if (name == "example_ordering") return ordering();
  if (name == "example_field_nonunique") return field_nonunique();
  if (name == "example_frechet_62") return {frechet_62()};
  if (name == "example_independent_63") return {independent_63()};
  if (name == "example_diagonal_46") return {diagonal_46()};
  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown builtin '" + name + "' (known: " + known + ")");
}

}  // namespace pbox::cli
