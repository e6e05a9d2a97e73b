#ifndef ADMMTRACK_ERRORS_HPP_
#define ADMMTRACK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace admmtrack {

// Configuration / usage problems (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures: warm start not converged, degenerate decay fit,
// connectivity unreachable (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace admmtrack

#endif  // ADMMTRACK_ERRORS_HPP_
