#pragma once

#include <stdexcept>
#include <string>

namespace fleq {

// Linear solve hit a pivot below the singularity threshold.
struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative search exhausted its iteration budget.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cost synthesis had no usable trading target.
struct DegeneratePeriod : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A tariff component left the box; carries the theta range that stays inside.
struct BoxViolation : std::runtime_error {
  double theta_lo;
  double theta_hi;
  BoxViolation(const std::string& what, double lo, double hi)
      : std::runtime_error(what), theta_lo(lo), theta_hi(hi) {}
};

// Bargaining over a pie that is not positive.
struct NoSurplus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; line numbers are 1-based.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_in, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line_in) + ": " + reason),
        line(line_in) {}
};

// Invalid or inconsistent scenario configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fleq
