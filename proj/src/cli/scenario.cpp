#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pbox/builtins.hpp"
#include "pbox/cli.hpp"
#include "pbox/error.hpp"

namespace pbox::cli {
namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw ParseError("schema error at " + (path.empty() ? std::string("/") : path) + ": " + message, 0, 0);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing key '") + key + "'");
  return *it;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) schema_error(path, "unknown key '" + it.key() + "'");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) schema_error(path, "expected true or false");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

std::size_t index(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) schema_error(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
  return v;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<std::size_t> indices(const json& v, const std::string& path) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) out.push_back(index(v[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<std::pair<double, double>> knots(const json& v, const std::string& path) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    if (!v[i].is_array() || v[i].size() != 2) schema_error(p, "expected a pair [x, value]");
    out.emplace_back(number(v[i][0], p + "/0"), number(v[i][1], p + "/1"));
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

ElementSpace make_space(std::vector<std::string> elements, std::vector<std::size_t> class_of,
                        std::vector<std::string> class_labels) {
  return {std::move(elements), std::move(class_of), FiniteQuotientSpace(std::move(class_labels))};
}

ElementSpace singleton_space(const std::vector<std::string>& labels) {
  std::vector<std::size_t> class_of(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) class_of[i] = i;
  return make_space(labels, class_of, labels);
}

ElementSpace parse_space(const json& v, const std::string& path) {
  check_keys(v, {"type", "labels", "classes"}, path);
  const std::string type = string(require(v, "type", path), path + "/type");
  if (type != "finite") schema_error(path + "/type", "expected 'finite' or 'z_induced'");
  if (v.contains("labels") == v.contains("classes")) schema_error(path, "give exactly one of 'labels' or 'classes'");
  if (v.contains("labels")) {
    std::vector<std::string> labels;
    const auto& arr = array(v["labels"], path + "/labels");
    for (std::size_t i = 0; i < arr.size(); ++i) labels.push_back(string(arr[i], path + "/labels/" + std::to_string(i)));
    return singleton_space(labels);
  }
  std::vector<std::string> elements;
  std::vector<std::size_t> class_of;
  std::vector<std::string> class_labels;
  const auto& arr = array(v["classes"], path + "/classes");
  for (std::size_t c = 0; c < arr.size(); ++c) {
    const std::string cp = path + "/classes/" + std::to_string(c);
    const auto& members = array(arr[c], cp);
    if (members.empty()) throw ValidationError("equivalence class " + std::to_string(c) + " is empty");
    std::string label = "{";
    for (std::size_t i = 0; i < members.size(); ++i) {
      elements.push_back(string(members[i], cp + "/" + std::to_string(i)));
      class_of.push_back(c);
      label += (i ? "," : "") + elements.back();
    }
    class_labels.push_back(label + "}");
  }
  std::set<std::string> unique(elements.begin(), elements.end());
  if (unique.size() != elements.size()) throw ValidationError("space elements must be unique");
  return make_space(std::move(elements), std::move(class_of), std::move(class_labels));
}

Oscillation parse_oscillation(const std::string& name, const json& v, const std::string& path) {
  check_keys(v, {"knots", "staircase", "constant"}, path);
  Oscillation osc;
  if (v.contains("knots")) {
    osc = Oscillation::piecewise_linear(name, knots(v["knots"], path + "/knots"));
  } else if (v.contains("staircase")) {
    osc = Oscillation::staircase(name, numbers(v["staircase"], path + "/staircase"));
  } else if (v.contains("constant")) {
    osc = Oscillation::constant(number(v["constant"], path + "/constant"));
    osc.name = name;
  } else {
    schema_error(path, "expected 'knots', 'staircase' or 'constant'");
  }
  validate(osc);
  return osc;
}

RealLineCdf parse_real_cdf(const json& v, const std::string& path) {
  if (v.is_object()) {
    check_keys(v, {"point_mass"}, path);
    return RealLineCdf::point_mass(number(require(v, "point_mass", path), path + "/point_mass"));
  }
  return RealLineCdf::piecewise_linear(knots(v, path));
}

RealLinePBox parse_variable(const json& v, const std::string& path) {
  check_keys(v, {"knots", "point_mass", "lower_knots", "upper_knots"}, path);
  RealLinePBox box;
  if (v.contains("knots")) {
    box = RealLinePBox::precise(RealLineCdf::piecewise_linear(knots(v["knots"], path + "/knots")));
  } else if (v.contains("point_mass")) {
    box = RealLinePBox::precise(RealLineCdf::point_mass(number(v["point_mass"], path + "/point_mass")));
  } else {
    box = {parse_real_cdf(require(v, "lower_knots", path), path + "/lower_knots"),
           parse_real_cdf(require(v, "upper_knots", path), path + "/upper_knots")};
  }
  box.validate();
  return box;
}

MarginalSpec parse_marginal(const json& v, const std::string& path, std::vector<std::string>* labels) {
  check_keys(v, {"name", "levels", "labels", "lower", "upper", "lower_knots", "upper_knots"}, path);
  const std::string name = v.contains("name") ? string(v["name"], path + "/name") : "";
  if (v.contains("levels")) {
    auto levels = numbers(v["levels"], path + "/levels");
    auto lower = numbers(require(v, "lower", path), path + "/lower");
    auto upper = numbers(require(v, "upper", path), path + "/upper");
    if (lower.size() != levels.size() || upper.size() != levels.size()) {
      throw ValidationError("marginal '" + name + "' needs one lower and upper value per level");
    }
    labels->clear();
    if (v.contains("labels")) {
      const auto& arr = array(v["labels"], path + "/labels");
      for (std::size_t i = 0; i < arr.size(); ++i) labels->push_back(string(arr[i], path + "/labels/" + std::to_string(i)));
      if (labels->size() != levels.size()) throw ValidationError("marginal '" + name + "' needs one label per level");
    } else {
      for (std::size_t i = 0; i < levels.size(); ++i) labels->push_back(name + std::to_string(i + 1));
    }
    return MarginalSpec::finite(name, std::move(levels), std::move(lower), std::move(upper));
  }
  return MarginalSpec::continuum(name, Cdf::piecewise_linear(knots(require(v, "lower_knots", path), path + "/lower_knots")),
                                 Cdf::piecewise_linear(knots(require(v, "upper_knots", path), path + "/upper_knots")));
}

CombinationRule parse_rule(const json& v, const std::string& path) {
  const std::string name = string(v, path);
  if (name == "frechet") return CombinationRule::frechet();
  if (name == "independence") return CombinationRule::independence();
  schema_error(path, "expected 'frechet' or 'independence'");
}

// Product of finite marginal element sets; classes are the joint z-levels.
ElementSpace product_space(const std::vector<MarginalSpec>& marginals,
                           const std::vector<std::vector<std::string>>& labels) {
  const auto levels = joint_levels(marginals);
  std::size_t size = 1;
  for (const auto& m : marginals) size *= m.levels.size();
  std::vector<std::string> elements;
  std::vector<std::size_t> class_of;
  for (std::size_t x = 0; x < size; ++x) {
    std::size_t rest = x;
    double z = 0.0;
    std::string name = "(";
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      const std::size_t k = rest % marginals[i].levels.size();
      rest /= marginals[i].levels.size();
      z = std::max(z, marginals[i].levels[k]);
      name += (i ? "," : "") + labels[i][k];
    }
    elements.push_back(name + ")");
    class_of.push_back(static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), z) - levels.begin()));
  }
  std::vector<std::string> class_labels;
  for (double z : levels) {
    std::ostringstream os;
    os << "z=" << z;
    class_labels.push_back(os.str());
  }
  return make_space(std::move(elements), std::move(class_of), std::move(class_labels));
}

QueryKind parse_kind(const std::string& kind, const std::string& path) {
  static const std::map<std::string, QueryKind> kinds = {
      {"event_lower", QueryKind::kEventLower},
      {"event_upper", QueryKind::kEventUpper},
      {"expectation_lower", QueryKind::kExpectationLower},
      {"expectation_upper", QueryKind::kExpectationUpper},
      {"threshold", QueryKind::kThreshold},
      {"arith_add", QueryKind::kArithAdd},
      {"arith_op", QueryKind::kArithOp},
  };
  auto it = kinds.find(kind);
  if (it == kinds.end()) schema_error(path, "unknown query kind '" + kind + "'");
  return it->second;
}

ArithOp parse_op(const std::string& op, const std::string& path) {
  if (op == "add") return ArithOp::kAdd;
  if (op == "subtract") return ArithOp::kSubtract;
  if (op == "multiply") return ArithOp::kMultiply;
  if (op == "divide") return ArithOp::kDivide;
  schema_error(path, "expected add, subtract, multiply or divide");
}

std::vector<std::size_t> element_indices(const json& v, const ElementSpace& space, const std::string& path) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    if (v[i].is_string()) {
      auto it = std::find(space.elements.begin(), space.elements.end(), v[i].get<std::string>());
      if (it == space.elements.end()) throw ValidationError("unknown element '" + v[i].get<std::string>() + "'");
      out.push_back(static_cast<std::size_t>(it - space.elements.begin()));
    } else {
      out.push_back(index(v[i], p));
      if (out.back() >= space.elements.size()) throw ValidationError("element index out of range");
    }
  }
  return out;
}

Query parse_query(const json& v, std::size_t position, Scenario& scenario, const std::string& path) {
  check_keys(v, {"id", "kind", "intervals", "field", "classes", "elements", "product", "complement", "oscillation",
                 "gamble", "target", "x1", "x2", "op", "y", "y_grid"},
             path);
  Query q;
  q.id = v.contains("id") ? string(v["id"], path + "/id") : "q" + std::to_string(position + 1);
  q.kind = parse_kind(string(require(v, "kind", path), path + "/kind"), path + "/kind");
  switch (q.kind) {
    case QueryKind::kEventLower:
    case QueryKind::kEventUpper: {
      const int forms = v.contains("intervals") + v.contains("field") + v.contains("classes") +
                        v.contains("elements") + v.contains("product");
      if (forms != 1) schema_error(path, "give exactly one of intervals, field, classes, elements or product");
      if (v.contains("intervals")) {
        std::vector<ZInterval> pieces;
        const auto& arr = array(v["intervals"], path + "/intervals");
        for (std::size_t i = 0; i < arr.size(); ++i) {
          const std::string p = path + "/intervals/" + std::to_string(i);
          if (!arr[i].is_array() || arr[i].size() != 4) schema_error(p, "expected [lo, hi, lo_open, hi_open]");
          pieces.push_back({number(arr[i][0], p + "/0"), number(arr[i][1], p + "/1"), boolean(arr[i][2], p + "/2"),
                            boolean(arr[i][3], p + "/3")});
        }
        q.z_image = normalize(std::move(pieces));
      } else if (v.contains("field")) {
        q.field = numbers(v["field"], path + "/field");
      } else if (v.contains("classes")) {
        q.classes = indices(v["classes"], path + "/classes");
      } else if (v.contains("elements")) {
        if (!scenario.space) throw ValidationError("element events need a finite space");
        q.elements = element_indices(v["elements"], *scenario.space, path + "/elements");
      } else {
        std::vector<std::vector<std::size_t>> sets;
        const auto& arr = array(v["product"], path + "/product");
        for (std::size_t i = 0; i < arr.size(); ++i) sets.push_back(indices(arr[i], path + "/product/" + std::to_string(i)));
        q.product = std::move(sets);
        if (v.contains("complement")) q.complement = boolean(v["complement"], path + "/complement");
      }
      break;
    }
    case QueryKind::kExpectationLower:
    case QueryKind::kExpectationUpper:
    case QueryKind::kThreshold: {
      if (v.contains("gamble")) {
        if (q.kind == QueryKind::kThreshold) schema_error(path, "threshold queries need an oscillation");
        q.gamble = numbers(v["gamble"], path + "/gamble");
      } else {
        const json& osc = require(v, "oscillation", path);
        if (osc.is_string()) {
          q.oscillation = osc.get<std::string>();
        } else {
          q.oscillation = q.id;
          scenario.oscillations.insert_or_assign(q.id, parse_oscillation(q.id, osc, path + "/oscillation"));
        }
      }
      if (q.kind == QueryKind::kThreshold) q.target = number(require(v, "target", path), path + "/target");
      break;
    }
    case QueryKind::kArithAdd:
    case QueryKind::kArithOp: {
      q.x1 = string(require(v, "x1", path), path + "/x1");
      q.x2 = string(require(v, "x2", path), path + "/x2");
      q.op = q.kind == QueryKind::kArithAdd ? ArithOp::kAdd
                                            : parse_op(string(require(v, "op", path), path + "/op"), path + "/op");
      if (v.contains("y") == v.contains("y_grid")) schema_error(path, "give exactly one of 'y' or 'y_grid'");
      if (v.contains("y")) {
        q.ys = numbers(v["y"], path + "/y");
      } else {
        const auto& g = v["y_grid"];
        check_keys(g, {"lo", "hi", "n"}, path + "/y_grid");
        const double lo = number(require(g, "lo", path + "/y_grid"), path + "/y_grid/lo");
        const double hi = number(require(g, "hi", path + "/y_grid"), path + "/y_grid/hi");
        const std::size_t n = index(require(g, "n", path + "/y_grid"), path + "/y_grid/n");
        if (n < 2 || !(lo <= hi)) throw ValidationError("y_grid needs n >= 2 and lo <= hi");
        for (std::size_t i = 0; i < n; ++i) q.ys.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
      }
      break;
    }
  }
  return q;
}

void apply_config(const json& v, QuadratureConfig& cfg, const std::string& path) {
  check_keys(v, {"abs_tol", "tail_tol", "max_refinements", "cut_grid", "bisect_tol"}, path);
  if (v.contains("abs_tol")) cfg.abs_tol = number(v["abs_tol"], path + "/abs_tol");
  if (v.contains("tail_tol")) cfg.tail_tol = number(v["tail_tol"], path + "/tail_tol");
  if (v.contains("max_refinements")) cfg.max_refinements = static_cast<int>(index(v["max_refinements"], path + "/max_refinements"));
  if (v.contains("cut_grid")) cfg.cut_grid = index(v["cut_grid"], path + "/cut_grid");
  if (v.contains("bisect_tol")) cfg.bisect_tol = number(v["bisect_tol"], path + "/bisect_tol");
  validate(cfg);
}

Scenario from_json(const json& doc) {
  check_keys(doc, {"name", "space", "pbox", "oscillations", "variables", "queries", "config"}, "");
  Scenario s;
  if (doc.contains("name")) s.name = string(doc["name"], "/name");
  bool continuum = true;
  if (doc.contains("space")) {
    const auto& sp = doc["space"];
    const std::string type = string(require(sp, "type", "/space"), "/space/type");
    if (type == "z_induced") {
      check_keys(sp, {"type"}, "/space");
    } else {
      s.space = parse_space(sp, "/space");
      continuum = false;
    }
  }
  if (doc.contains("pbox")) {
    const auto& pb = doc["pbox"];
    check_keys(pb, {"builtin", "lower", "upper", "lower_knots", "upper_knots", "marginals", "rule"}, "/pbox");
    if (pb.contains("builtin")) {
      if (s.space) throw ValidationError("builtin p-boxes live on their own space");
      const auto fixtures = builtin_scenarios(string(pb["builtin"], "/pbox/builtin"));
      const Scenario& base = fixtures.front();
      s.space = base.space;
      s.pbox = base.pbox;
      s.marginals = base.marginals;
      s.rule = base.rule;
      s.oscillations = base.oscillations;
      s.variables = base.variables;
    } else if (pb.contains("marginals")) {
      s.rule = parse_rule(require(pb, "rule", "/pbox"), "/pbox/rule");
      std::vector<std::vector<std::string>> labels;
      const auto& arr = array(pb["marginals"], "/pbox/marginals");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        labels.emplace_back();
        s.marginals.push_back(parse_marginal(arr[i], "/pbox/marginals/" + std::to_string(i), &labels.back()));
      }
      s.pbox = combine(s.marginals, *s.rule);
      if (s.pbox->is_finite()) {
        if (s.space) throw ValidationError("finite marginals define their own product space");
        s.space = product_space(s.marginals, labels);
      }
    } else if (pb.contains("lower")) {
      if (continuum) throw ValidationError("step CDFs need a finite space");
      s.pbox = PBox(s.space->quotient, Cdf::step(numbers(pb["lower"], "/pbox/lower")),
                    Cdf::step(numbers(require(pb, "upper", "/pbox"), "/pbox/upper")));
    } else {
      if (!continuum) throw ValidationError("piecewise-linear CDFs need the z-induced space");
      s.pbox = PBox(Cdf::piecewise_linear(knots(require(pb, "lower_knots", "/pbox"), "/pbox/lower_knots")),
                    Cdf::piecewise_linear(knots(require(pb, "upper_knots", "/pbox"), "/pbox/upper_knots")));
    }
  }
  if (doc.contains("oscillations")) {
    const auto& oscs = doc["oscillations"];
    if (!oscs.is_object()) schema_error("/oscillations", "expected an object");
    for (auto it = oscs.begin(); it != oscs.end(); ++it) {
      s.oscillations.insert_or_assign(it.key(), parse_oscillation(it.key(), it.value(), "/oscillations/" + it.key()));
    }
  }
  if (doc.contains("variables")) {
    const auto& vars = doc["variables"];
    if (!vars.is_object()) schema_error("/variables", "expected an object");
    for (auto it = vars.begin(); it != vars.end(); ++it) {
      s.variables.insert_or_assign(it.key(), parse_variable(it.value(), "/variables/" + it.key()));
    }
  }
  if (doc.contains("config")) apply_config(doc["config"], s.config, "/config");
  const auto& queries = array(require(doc, "queries", ""), "/queries");
  for (std::size_t i = 0; i < queries.size(); ++i) {
    s.queries.push_back(parse_query(queries[i], i, s, "/queries/" + std::to_string(i)));
  }
  return s;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    throw ParseError(pos == std::string::npos ? what : what.substr(pos), line, column);
  }
  try {
    return from_json(doc);
  } catch (const json::exception& e) {
    throw ParseError(std::string("schema error: ") + e.what(), 0, 0);
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read scenario file '" + path + "'", 0, 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Scenario s = parse_scenario(buffer.str());
  if (s.name.empty()) s.name = path;
  return s;
}

}  // namespace pbox::cli
