#pragma once

#include <stdexcept>
#include <string>

namespace qtm4f {

// Precondition or input-domain violation (bad parameter, bad range, bad file).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Iterative solver did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Least-squares normal matrix is (numerically) singular; names the pair of
// parameters that cannot be separated by the data.
class DegenerateFitError : public std::runtime_error {
 public:
  DegenerateFitError(const std::string& what, std::string first, std::string second)
      : std::runtime_error(what), first_(std::move(first)), second_(std::move(second)) {}
  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }

 private:
  std::string first_;
  std::string second_;
};

}  // namespace qtm4f
