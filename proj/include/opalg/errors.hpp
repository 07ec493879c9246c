#pragma once

#include <stdexcept>
#include <string>

namespace opalg {

/// Thrown when a requested construction would exceed a hard size limit.
class SizeLimitError : public std::runtime_error {
 public:
  SizeLimitError(std::string what, std::size_t requested, std::size_t limit)
      : std::runtime_error(std::move(what)), requested_(requested), limit_(limit) {}

  std::size_t requested() const { return requested_; }
  std::size_t limit() const { return limit_; }

 private:
  std::size_t requested_;
  std::size_t limit_;
};

/// Thrown when an iterative norm computation fails to converge within its
/// iteration cap.  Carries the last iterate value and residual so callers
/// can decide whether the partial answer is usable.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string what, double last_value, double residual, int iterations)
      : std::runtime_error(std::move(what)),
        last_value_(last_value),
        residual_(residual),
        iterations_(iterations) {}

  double last_value() const { return last_value_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double last_value_;
  double residual_;
  int iterations_;
};

}  // namespace opalg
