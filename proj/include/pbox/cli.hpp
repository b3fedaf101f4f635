#ifndef PBOX_CLI_HPP
#define PBOX_CLI_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbox/choquet.hpp"
#include "pbox/multivariate.hpp"
#include "pbox/pbox.hpp"
#include "pbox/preorder.hpp"

namespace pbox::cli {

/// Malformed scenario text or schema.  Line and column are 1-based; 0 when
/// the error has no position in the source text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error(message), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

enum class QueryKind {
  kEventLower,
  kEventUpper,
  kExpectationLower,
  kExpectationUpper,
  kThreshold,
  kArithAdd,
  kArithOp,
};

std::string to_string(QueryKind kind);

struct Query {
  std::string id;
  QueryKind kind = QueryKind::kEventLower;

  // Events.  Exactly one form is used:
  std::optional<ZEventSet> z_image;              // interior image (lower) or closure image (upper)
  std::optional<std::vector<double>> field;      // endpoints x0 < x1 < ... for (x0,x1] u ...
  std::optional<std::vector<std::size_t>> classes;   // class indices of a finite space
  std::optional<std::vector<std::size_t>> elements;  // element indices of a finite space
  std::optional<std::vector<std::vector<std::size_t>>> product;  // per-factor class sets
  bool complement = false;                                       // event is the complement of `product`

  // Expectations and thresholds.
  std::string oscillation;
  std::optional<std::vector<double>> gamble;  // per element of a finite space
  double target = 0.0;

  // Arithmetic.
  std::string x1;
  std::string x2;
  ArithOp op = ArithOp::kAdd;
  std::vector<double> ys;
};

/// Finite space with named elements grouped into equivalence classes.
struct ElementSpace {
  std::vector<std::string> elements;
  std::vector<std::size_t> class_of;  // element -> class index
  FiniteQuotientSpace quotient;
};

struct Scenario {
  std::string name;
  std::optional<ElementSpace> space;  // empty for the z-induced continuum
  std::optional<PBox> pbox;
  std::vector<MarginalSpec> marginals;
  std::optional<CombinationRule> rule;
  std::map<std::string, Oscillation> oscillations;
  std::map<std::string, RealLinePBox> variables;
  std::vector<Query> queries;
  QuadratureConfig config;
};

/// Parses a scenario document.  Throws ParseError for syntax and schema
/// problems and ValidationError for invalid values.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Names accepted by `paper` and by {"pbox": {"builtin": name}}.
std::vector<std::string> builtin_names();
/// The scenarios reproducing one builtin case (some need several p-boxes).
std::vector<Scenario> builtin_scenarios(const std::string& name);

struct Row {
  std::string query_id;
  std::string kind;
  double value = 0.0;
  double error_bound = 0.0;
  bool flagged = false;  // quadrature missed abs_tol
  double elapsed_ms = 0.0;
  // Darboux bracket for quadrature rows; equal to value otherwise.
  double lower = 0.0;
  double upper = 0.0;
};

struct RunOptions {
  std::optional<double> abs_tol;
  std::optional<double> tail_tol;
  std::optional<int> max_refinements;
  bool timing = true;
};

QuadratureConfig effective_config(const Scenario& scenario, const RunOptions& options);

/// Evaluates every query; rows come out in query order.
std::vector<Row> run_scenario(const Scenario& scenario, const RunOptions& options = {});

inline constexpr const char* kCsvHeader = "query_id,kind,value,error_bound,elapsed_ms";
void write_csv(std::ostream& out, const std::vector<Row>& rows, bool header = true);

enum class TableKind { kCdf, kIntegrand };

/// z,lower,upper (or class,lower,upper on finite spaces) for kCdf;
/// t,lower_cut,upper_cut for kIntegrand on the named oscillation.
void write_table(std::ostream& out, const Scenario& scenario, TableKind what, std::size_t grid,
                 const std::string& oscillation, std::optional<double> t_max, const RunOptions& options = {});

/// Command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pbox::cli

#endif  // PBOX_CLI_HPP
