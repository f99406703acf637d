#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>

#include <json.hpp>

#include "dbar/conductivity.hpp"
#include "dbar/geometry.hpp"

namespace dbar {

/// Spectral collocation on the unit disk: Chebyshev in r ∈ [−1, 1] (odd degree, so the
/// origin is not a node) and Fourier in θ, folding negative radii onto θ + π.
/// Solves either ∇·(σ∇U) = 0 or ΔU − qU = 0 with Dirichlet data on r = 1.
class PolarSolver {
 public:
  struct Options {
    int radial_degree = 61;  // odd
    int angular = 128;       // even
  };

  /// Conductivity operator σΔU + ∇σ·∇U, coefficients from the jet of σ.
  static PolarSolver conductivity(const std::function<Jet(cplx)>& sigma, Options opt);
  /// Schrödinger operator ΔU − qU.
  static PolarSolver schrodinger(const std::function<double(cplx)>& q, Options opt);

  int radial_degree() const { return n_; }
  int angular() const { return m_; }
  int interior_radii() const { return (n_ - 1) / 2; }
  /// Positive Chebyshev radii x_1 > … > x_{N2} in (0, 1).
  const Eigen::VectorXd& radii() const { return r_; }

  /// Interior nodal values (N2 × M) for Dirichlet data at θ_k = 2πk/M.
  Eigen::MatrixXd solve(const Eigen::VectorXd& g) const;
  /// Normal derivative ∂_r U on r = 1 from Dirichlet data and the interior solution.
  Eigen::VectorXd normal_derivative(const Eigen::VectorXd& g, const Eigen::MatrixXd& u) const;
  /// Nodal Dirichlet-to-Neumann matrix (M × M).
  Eigen::MatrixXd dtn() const;
  /// Spectral interpolant of the solution on the closed unit disk.
  std::function<double(cplx)> interpolator(const Eigen::VectorXd& g, const Eigen::MatrixXd& u) const;

  /// Relative residual ‖Au + Bg‖/‖Bg‖ of the last factorization check.
  double factorization_residual() const { return residual_; }

 private:
  PolarSolver(int n, int m);
  void assemble(const std::function<void(int j, int k, double r, double th, double& c2, double& c1r,
                                         double& c1t, double& c0)>& coeff);

  int n_, m_;
  Eigen::VectorXd x_, r_;
  Eigen::MatrixXd d1_, d2_, f1_, f2_;
  Eigen::MatrixXd b_;  // boundary coupling (N2·M × M)
  std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  double residual_ = 0.0;
};

/// Boundary operators in the nodal basis at the PlaneDomain nodes t_k = 2πk/N_b.
/// Φψ is the coefficient of ds in the restriction of ∂̄ψ̃ dz̄ to bX:
///   Φψ = −(i/2)(∂_ν ψ̃ + i ∂_τ ψ),
/// with ψ̃ the √σ-weighted solution (ψ̃ = U near bX because σ ≡ 1 on the collar).
struct DtNData {
  std::vector<geometry::BoundaryNode> nodes;
  double radius = 1.0;
  Eigen::MatrixXcd phi, phi0;
  Eigen::MatrixXd lambda_diff;  // Λ_σ − Λ_1, both from the same discretization
  nlohmann::json metadata;

  int size() const { return int(nodes.size()); }
};

struct ForwardOptions {
  int radial_degree = 81;
  int angular = 64;  // collocation points in θ; boundary data are trig-resampled to and from N_b
};

/// Exact nodal Λ_1 + i∂_τ combinations on a circle of the given radius.
Eigen::MatrixXd laplace_dtn(int nb, double radius);
Eigen::MatrixXcd phi0_matrix(int nb, double radius);

/// Dirichlet problem ∇·(σ∇U) = 0, U = u on bX (circles only). Values outside X̄ are 0.
RealField solve_dirichlet(const ConductivityField& sigma, const geometry::PlaneDomain& domain,
                          const Eigen::VectorXd& u, ForwardOptions opt = {});
ComplexField solve_dirichlet(const ConductivityField& sigma, const geometry::PlaneDomain& domain,
                             const Eigen::VectorXcd& u, ForwardOptions opt = {});

DtNData dtn_operators(const ConductivityField& sigma, const geometry::PlaneDomain& domain,
                      ForwardOptions opt = {});

/// Adds real Gaussian noise of standard deviation level·max|Λ_σ − Λ_1| to the DtN difference
/// and updates Φ accordingly.
void add_noise(DtNData& dtn, double level, std::uint64_t seed);

/// Near-diagonal behaviour of the kernel of Φ − Φ0 (entries divided by the quadrature weight).
struct SingularityProfile {
  // max |Φ − Φ0|(ξ, w) / (1 + |ln|ξ − w||) over h ≤ |ξ − w| ≤ 10h; the 1 keeps pairs near
  // |ξ − w| = 1 (where the logarithm vanishes) from dominating on coarse boundaries
  double max_ratio = 0.0;
  int pairs = 0;
  nlohmann::json to_json() const { return {{"max_ratio", max_ratio}, {"pairs", pairs}}; }
};
SingularityProfile singularity_profile(const DtNData& dtn);

/// Low-pass trigonometric resampling of nodal values between equispaced grids.
Eigen::MatrixXd trig_resample(int from, int to);

}  // namespace dbar
