#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbar/faddeev.hpp"
#include "dbar/forward.hpp"
#include "dbar/scattering.hpp"

namespace dbar {

enum class Formula {
  A,  // q̂ = Δψ/ψ at a single λ
  B,  // q̂ = lim_{λ→∞} 4λ e^{−λz}∂̄ψ: directions averaged per |λ|, limit read at the largest |λ|
  C   // q̂ = lim_{λ→0} Δμ/μ, extrapolated in λ (exact when λ = 0 is supplied)
};
std::string to_string(Formula f);
Formula parse_formula(const std::string& s);

struct QOptions {
  double psi_threshold = 1e-3;  // A: nodes with |ψ| below this are masked
  double mu_threshold = 0.1;    // C: nodes with |μ| below this are masked
  double min_coverage = 0.5;    // fraction of X that must stay unmasked
  double region_radius = 1.0;   // X = {|z| < region_radius}
};

struct QReconstruction {
  Formula formula = Formula::A;
  Grid2D grid;
  RealField q;     // real part of the formula value, 0 on masked nodes
  RealField mask;  // 1 where the formula was evaluated
  std::vector<cplx> lambdas;
  double imaginary_ratio = 0.0;       // ‖Im‖/‖Re‖ over X
  double coverage = 1.0;              // unmasked share of X
  double extrapolation_spread = 0.0;  // B: relative change between the two largest rings; C: size of the extrapolation step
  std::optional<std::string> warning;
};

/// q̂ from Faddeev fields on a common grid by formula A, B or C.
/// Default λ-sets: A {1}; B |λ| ∈ {4, 6, 8} × 8 directions (b_lambda_set()); C {0.4, 0.2} or {0}.
QReconstruction q_from_psi(const FaddeevField& fields, Formula formula, const QOptions& opt = {});

std::vector<cplx> b_lambda_set(const std::vector<double>& moduli = {4, 6, 8}, int directions = 8);

struct SigmaOptions {
  int radial_degree = 41;
  int angular = 64;
};

struct SigmaReconstruction {
  Grid2D grid;
  RealField sigma;  // w² inside X, 1 outside
  double w_min = 0.0;
};

/// σ = w² with Δw − q̂w = 0 in the disk of radius `radius`, w = 1 on its boundary.
/// q̂ is interpolated from the grid; a nonpositive w means q̂ is not a conductivity potential.
SigmaReconstruction sigma_from_q(const RealField& q, const Grid2D& grid, double radius,
                                 const SigmaOptions& opt = {});

struct ErrorReport {
  double rel_l2 = 0.0, rel_linf = 0.0;
  std::optional<double> bump_amplitude_error, bump_center_error;
  nlohmann::json to_json() const;
};

/// Errors over X = {|z| < radius}; bump errors when `bump_center` is given (preset phantoms).
ErrorReport error_metrics(const RealField& rec, const RealField& truth, const Grid2D& grid, double radius,
                          std::optional<cplx> bump_center = std::nullopt);

/// μ(z, λ) for each λ on every node of `grid`, from λ-equation solves at the nodes.
FaddeevField faddeev_field_from_dbar(const DbarSolver& solver, const Grid2D& grid, const std::vector<cplx>& lambdas,
                                     int jobs = 1);

/// Cubic resampling of a nodal field between grids covering the same square.
RealField resample(const RealField& f, const Grid2D& from, const Grid2D& to);

struct ReconstructionResult {
  QReconstruction q;
  SigmaReconstruction sigma;
  std::optional<ErrorReport> errors;
  nlohmann::json to_json() const;
};

}  // namespace dbar
