#include "pbox/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pbox/error.hpp"
#include "pbox/preorder.hpp"

namespace pbox {
namespace {

constexpr double kTopTolerance = 1e-12;

std::size_t class_index(double z, std::size_t n) {
  if (z != std::floor(z) || z < 0.0 || z >= static_cast<double>(n)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", z);
    throw ValidationError(std::string("class index ") + buf + " outside the finite space");
  }
  return static_cast<std::size_t>(z);
}

void check_unit(double z) {
  if (!(z >= 0.0 && z <= 1.0)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", z);
    throw ValidationError(std::string("coordinate ") + buf + " outside [0,1]");
  }
}

}  // namespace

Cdf Cdf::step(std::vector<double> values) { return Cdf(Step{std::move(values)}); }

Cdf Cdf::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ValidationError("piecewise-linear CDF needs at least two knots");
  if (knots.front().first != 0.0 || knots.back().first != 1.0) {
    throw ValidationError("piecewise-linear CDF knots must span [0,1]");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].first < knots[i - 1].first) {
      throw ValidationError("piecewise-linear CDF knots must be sorted by z");
    }
  }
  return Cdf(PiecewiseLinear{std::move(knots)});
}

Cdf Cdf::analytic(std::string name, Function value) {
  return Cdf(Analytic{std::move(name), std::move(value), {}, true});
}

Cdf Cdf::analytic_with_jumps(std::string name, Function value, Function left_limit) {
  if (!left_limit) throw ValidationError("discontinuous analytic CDF needs a left-limit function");
  return Cdf(Analytic{std::move(name), std::move(value), std::move(left_limit), false});
}

bool Cdf::continuous() const {
  if (const auto* a = std::get_if<Analytic>(&rep_)) return a->continuous;
  if (const auto* p = std::get_if<PiecewiseLinear>(&rep_)) {
    for (std::size_t i = 1; i < p->knots.size(); ++i) {
      if (p->knots[i].first == p->knots[i - 1].first &&
          p->knots[i].second != p->knots[i - 1].second) {
        return false;
      }
    }
    return true;
  }
  return false;
}

std::size_t Cdf::num_classes() const {
  if (const auto* s = std::get_if<Step>(&rep_)) return s->values.size();
  return 0;
}

const std::vector<double>& Cdf::step_values() const {
  const auto* s = std::get_if<Step>(&rep_);
  if (!s) throw ValidationError("not a step CDF");
  return s->values;
}

std::vector<double> Cdf::breakpoints() const {
  std::vector<double> out;
  if (const auto* s = std::get_if<Step>(&rep_)) {
    for (std::size_t i = 0; i < s->values.size(); ++i) out.push_back(static_cast<double>(i));
  } else if (const auto* p = std::get_if<PiecewiseLinear>(&rep_)) {
    for (const auto& k : p->knots) out.push_back(k.first);
  }
  return out;
}

std::string Cdf::description() const {
  if (is_step()) return "step[" + std::to_string(num_classes()) + "]";
  if (const auto* p = std::get_if<PiecewiseLinear>(&rep_)) {
    return "piecewise-linear[" + std::to_string(p->knots.size()) + " knots]";
  }
  return "analytic:" + std::get<Analytic>(rep_).name;
}

double Cdf::eval(double z) const {
  if (z == kBottomSentinel) return 0.0;
  if (const auto* s = std::get_if<Step>(&rep_)) {
    return s->values[class_index(z, s->values.size())];
  }
  check_unit(z);
  if (const auto* p = std::get_if<PiecewiseLinear>(&rep_)) {
    const auto& k = p->knots;
    auto it = std::upper_bound(k.begin(), k.end(), z,
                               [](double v, const std::pair<double, double>& kn) { return v < kn.first; });
    const std::size_t j = static_cast<std::size_t>(it - k.begin()) - 1;
    if (j + 1 == k.size()) return k[j].second;
    const double w = (z - k[j].first) / (k[j + 1].first - k[j].first);
    return k[j].second + w * (k[j + 1].second - k[j].second);
  }
  return std::get<Analytic>(rep_).value(z);
}

double Cdf::left_limit(double z) const {
  if (z == kBottomSentinel) return 0.0;
  if (const auto* s = std::get_if<Step>(&rep_)) {
    const std::size_t i = class_index(z, s->values.size());
    return i == 0 ? 0.0 : s->values[i - 1];
  }
  check_unit(z);
  if (const auto* p = std::get_if<PiecewiseLinear>(&rep_)) {
    const auto& k = p->knots;
    auto it = std::lower_bound(k.begin(), k.end(), z,
                               [](const std::pair<double, double>& kn, double v) { return kn.first < v; });
    const std::size_t j = static_cast<std::size_t>(it - k.begin());
    if (k[j].first == z || j == 0) return k[j].second;
    const double w = (z - k[j - 1].first) / (k[j].first - k[j - 1].first);
    return k[j - 1].second + w * (k[j].second - k[j - 1].second);
  }
  const auto& a = std::get<Analytic>(rep_);
  return a.continuous ? a.value(z) : a.left_limit(z);
}

double cdf_eval(const Cdf& cdf, double z) { return cdf.eval(z); }
double cdf_left_limit(const Cdf& cdf, double z) { return cdf.left_limit(z); }

void validate(const Cdf& cdf, std::size_t grid) {
  auto check_value = [](double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("CDF value outside [0,1]");
  };
  if (cdf.is_step()) {
    const auto& v = cdf.step_values();
    if (v.empty()) throw ValidationError("step CDF has no classes");
    for (std::size_t i = 0; i < v.size(); ++i) {
      check_value(v[i]);
      if (i && v[i] < v[i - 1]) throw ValidationError("step CDF decreases at class " + std::to_string(i));
    }
    if (v.back() != 1.0) throw ValidationError("step CDF must equal 1 at the top class");
    return;
  }
  std::vector<double> zs = cdf.breakpoints();
  const std::size_t n = std::max<std::size_t>(grid, 2);
  for (std::size_t i = 0; i < n; ++i) zs.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  double prev = 0.0;
  for (double z : zs) {
    const double left = cdf.left_limit(z);
    const double v = cdf.eval(z);
    check_value(left);
    check_value(v);
    if (left < prev || v < left) {
      char buf[80];
      std::snprintf(buf, sizeof buf, "CDF %s decreases near z=%.12g", cdf.description().c_str(), z);
      throw ValidationError(buf);
    }
    prev = v;
  }
  if (std::abs(cdf.eval(1.0) - 1.0) > kTopTolerance) {
    throw ValidationError("CDF " + cdf.description() + " must equal 1 at z=1");
  }
}

}  // namespace pbox
