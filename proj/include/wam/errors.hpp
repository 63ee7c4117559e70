#pragma once

#include <stdexcept>
#include <string>

namespace wam {

// Bad or malformed input: files that do not parse, schema violations,
// values outside their documented domain. CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: diverging fits, rank-deficient systems, degenerate
// statistics. CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wam
