#pragma once

#include <stdexcept>
#include <string>

namespace fewshot {

// Malformed files, unknown tokens, dimension mismatches and undefined metrics.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the dual solver when max_passes is exhausted before the KKT gap
// drops below tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double violation)
      : std::runtime_error(what), violation_(violation) {}

  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

}  // namespace fewshot
