#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbar/reconstruct.hpp"

namespace dbar {

/// Pipeline stages in execution order; each reads the previous stage's directory under `out`.
inline const std::vector<std::string> stage_names = {"forward", "dtn", "boundary-psi", "scatter", "dbar", "reconstruct"};

/// Input stage directory of each stage ("" for forward, which starts from the phantom).
std::string stage_input(const std::string& stage);

struct RunConfig {
  struct Domain {
    std::string shape = "disk";
    double radius = 1.0;
    int grid = 128;            // interior grid nodes per side (forward truth and final σ)
    int boundary_nodes = 128;  // N_b
  } domain;

  struct Phantom {
    std::string name = "gaussian";
    nlohmann::json params = {{"amp", 0.5}, {"center", {0.0, 0.0}}, {"width", 0.3}};
  } phantom;

  ForwardOptions forward;

  struct Noise {
    double level = 0.0;  // relative to max |Λ_σ − Λ_1|
    std::uint64_t seed = 1;
  } noise;

  nlohmann::json lambda_grid = {{"kind", "cartesian"}, {"radius", 4.0}, {"n", 32}};

  struct Boundary {
    double max_condition = 1e8;
    std::vector<cplx> probe_lambdas = {{1.0, 0.0}, {1.5, 0.5}, {0.0, 2.0}};
  } boundary;

  struct Scatter {
    DbarMethod method = DbarMethod::analytic;
    double psi_threshold = 1e-8;
  } scatter;

  struct Dbar {
    int z_grid = 48;  // nodes per side of the z-grid on which μ(z, λ) is solved
    GmresOptions gmres;
  } dbar;

  struct Reconstruct {
    Formula formula = Formula::C;
    std::vector<cplx> lambdas = {{0.0, 0.0}};
    QOptions q;
    SigmaOptions sigma;
  } reconstruct;

  std::vector<std::string> stages = stage_names;
  std::string out = "run";
  int jobs = 1;
  std::uint64_t seed = 1;

  /// Parses a (possibly partial) JSON document over the defaults. Unknown keys are InputErrors.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;

  /// All checks that do not need stage outputs; throws InputError with the offending key.
  void validate() const;
  /// FNV-1a (64 bit) of the canonical dump, as 16 hex digits.
  std::string hash() const;

  LambdaGrid make_lambda_grid() const;
  geometry::PlaneDomain make_domain() const;
  ConductivityField make_phantom() const;
  Grid2D z_grid() const;
};

std::string fnv1a_hex(const std::string& s);

}  // namespace dbar
