#pragma once

#include <vector>

#include "dbar/conductivity.hpp"
#include "dbar/gmres.hpp"
#include "dbar/kernel.hpp"

namespace dbar {

/// μ(·, λ) on a grid covering supp q, with the density q̂μ/4 that represents it everywhere:
///   μ(z) = 1 + Σ_ξ E_λ(z − ξ) s(ξ) h²,  s = q̂μ/4.
struct FaddeevSlice {
  cplx lambda;
  Grid2D grid;
  ComplexField mu;
  ComplexField source;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // relative residual of μ − E*(q̂μ/4) = 1
  std::vector<double> history;
  double outer_ring_deviation = 0.0;  // max |μ − 1| on the outermost grid ring

  /// ψ = e^{λz}μ on the grid.
  ComplexField psi() const;
};

struct FaddeevField {
  std::vector<cplx> lambdas;
  std::vector<FaddeevSlice> slices;
};

/// Krylov solve of μ = 1 + E_λ * (q̂μ/4). λ = 0 is rejected (see the λ-limits of reconstruct).
/// Throws NumericalError with the residual history if GMRES does not converge.
FaddeevSlice solve_mu_interior(const PotentialField& q, cplx lambda, const GmresOptions& opt = {});
FaddeevSlice solve_mu_interior(const ConductivityField& sigma, cplx lambda, const Grid2D& grid,
                               const GmresOptions& opt = {});

/// Independent per-λ solves on up to `jobs` threads.
FaddeevField solve_mu_sweep(const PotentialField& q, const std::vector<cplx>& lambdas, int jobs = 1,
                            const GmresOptions& opt = {});

/// Off-grid evaluation: cubic interpolation of the nodal μ inside the grid, summation of the
/// source density outside it (exact for the discrete field there).
cplx mu_at(const FaddeevSlice& s, cplx z);
cplx dzbar_mu_at(const FaddeevSlice& s, cplx z);

/// b(λ) from the large-|z| limit of (z̄/λ̄) e^{λz − λ̄z̄} ∂_z̄μ, averaged over circles filling the
/// annulus [inner, outer]. The circle means converge to the limit for any circle enclosing
/// supp q, so the spread between circles measures the discretization, not the truncation.
struct LimitEstimate {
  cplx b;
  std::vector<double> radii;
  std::vector<cplx> circle_values;  // circle means of z̄ e^{λz−λ̄z̄}∂_z̄μ
  double dispersion = 0.0;          // max |circle value − mean| / |mean|
  bool flagged = false;             // dispersion > 10%
};
LimitEstimate b_from_limit(const FaddeevSlice& s, double support_radius, double inner = 2.4, double outer = 3.6,
                           int circles = 5, int angles = 128);

/// ‖f‖_{L^p} over the grid.
double lp_norm(const ComplexField& f, const Grid2D& grid, double p);

}  // namespace dbar
