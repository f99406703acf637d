#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace dbar {

struct SelftestCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured quantity
  double tolerance = 0.0;  // pass iff value ≤ tolerance, unless `detail` says otherwise
  std::string detail;
};

struct SelftestReport {
  std::string mode;
  std::vector<SelftestCheck> checks;
  bool canary_detected = false;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Invariants of the pipeline on small problems.
///   quick: σ ≡ 1 chain, exact recurrence, Green–Riemann, curve validator, mutation canary (seconds)
///   full:  quick plus comparisons against independent solvers on a Gaussian phantom (about a minute)
/// The canary flips the sign of Φ0 in a copy of the σ ≡ 1 data; the chain identity must then fail.
SelftestReport run_selftest(const std::string& mode, int jobs = 1);

}  // namespace dbar
