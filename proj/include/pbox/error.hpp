#ifndef PBOX_ERROR_HPP
#define PBOX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pbox {

// Raised when an input violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an internal computation reaches a state that valid inputs
// cannot produce (e.g. an infeasible credal polytope).
class ConsistencyError : public std::logic_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace pbox

#endif  // PBOX_ERROR_HPP
