#pragma once

#include <stdexcept>
#include <string>

namespace msent {

// Bad function arguments or malformed configuration.
struct param_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input data (edge lists, manifests, CSV).
struct parse_error : std::runtime_error {
  parse_error(const std::string& msg, size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
        line_number(line) {}
  size_t line_number;
};

// Numeric failures: non-convergence, undefined quantities, generation failure.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace msent
