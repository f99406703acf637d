#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dbar {

/// Malformed or inconsistent input (bad parameters, rejected polynomials, invalid configs).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: non-convergence, ill-conditioning, positivity loss.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), history_(std::move(history)) {}

  /// Residual history (or other diagnostics) carried with the failure.
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace dbar
