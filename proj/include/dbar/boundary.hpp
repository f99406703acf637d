#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>

#include <json.hpp>

#include "dbar/forward.hpp"
#include "dbar/kernel.hpp"

namespace dbar {

/// G_λ(v) = e^{λv}E_λ(v) = (2/π) Re Ei(λv), the kernel of (∂∂̄)^{-1} conjugated by e^{λz}.
cplx faddeev_g_conjugated(cplx v, cplx lambda);
/// G_λ(v) − (2/π) ln|v|, smooth across v = 0 (value γ + ln|λ| times 2/π there).
cplx faddeev_g_smooth(cplx v, cplx lambda);

/// Kress weights R_j(t) for ∫_0^{2π} ln(4 sin²((t − τ)/2)) f(τ) dτ on n equispaced nodes (n even).
Eigen::MatrixXd kress_log_weights(int n);

/// ψ|bX at the DtN nodes for one λ.
struct BoundaryTrace {
  cplx lambda;
  std::vector<geometry::BoundaryNode> nodes;
  Eigen::VectorXcd psi;
  double condition = 0.0;       // 1-norm condition estimate of the Nyström matrix
  double residual = 0.0;        // ‖(I − K)ψ − e^{λz}‖/‖e^{λz}‖
  int z_star = 0;               // node of maximal |ψ|, used as the reference point downstream
  double coefficient_tail = 0;  // share of ψ's trigonometric energy in the upper quarter of modes

  int size() const { return int(psi.size()); }
  nlohmann::json metadata() const;
};

struct BoundarySolveOptions {
  double max_condition = 1e8;
};

/// Nyström solve of ψ(z) = e^{λz} + (i/2) ∮ G_λ(z, ξ)(Φ − Φ0)ψ(ξ) ds(ξ) with the Kress product
/// rule for the logarithmic part of G_λ. For an external-table kernel the table is sampled at the
/// node pairs (E convention); its diagonal entries are taken as the regularized smooth part.
BoundaryTrace solve_psi_boundary(const DtNData& dtn, const GreenKernel& kernel, cplx lambda,
                                 const BoundarySolveOptions& opt = {});
BoundaryTrace solve_psi_boundary(const DtNData& dtn, cplx lambda, const BoundarySolveOptions& opt = {});

/// Factorized I − K for one λ; further right-hand sides (e.g. λ̄-derivatives) reuse the LU.
class BoundarySystem {
 public:
  BoundarySystem(const DtNData& dtn, const Eigen::MatrixXcd& k, cplx lambda, const BoundarySolveOptions& opt = {});
  const BoundaryTrace& trace() const { return trace_; }
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const { return lu_.solve(rhs); }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  BoundaryTrace trace_;
};

/// The Nyström operator K with ψ = e^{λz} + Kψ (exposed for spectral diagnostics).
Eigen::MatrixXcd boundary_operator(const DtNData& dtn, cplx lambda);

/// Smooth test field with its Wirtinger derivatives.
struct TestField {
  std::function<cplx(cplx)> value, dz, dzbar, dzdzbar;
};

/// Both sides of ∫_X (g∂∂̄f − f∂∂̄g) dz∧dz̄ = ∮ g ∂̄f dz̄ + f ∂g dz on a domain star-shaped about its
/// centroid: area by Gauss–Legendre in the radial scale × trapezoid in the boundary parameter
/// (n/2 × n nodes), boundary by the trapezoid rule on the n nodes.
struct GreenRiemann {
  cplx area_side, boundary_side;
  double residual() const { return std::abs(area_side - boundary_side); }
};
GreenRiemann green_riemann_residual(const TestField& f, const TestField& g, const geometry::PlaneDomain& domain);

/// The two boundary integrals of the exterior representation at z:
///   single = (i/2)∮ G_λ(z,ξ) ∂̄ψ dξ̄,  cauchy = (i/2)∮ ψ(ξ) ∂_ξG_λ(z,ξ) dξ.
struct LayerValues {
  cplx single, cauchy;
};
LayerValues layer_potentials(const std::vector<geometry::BoundaryNode>& nodes, const Eigen::VectorXcd& psi,
                             const Eigen::VectorXcd& dbar_psi, cplx lambda, cplx z);

struct ExteriorValue {
  cplx psi;
  std::optional<std::string> warning;  // set when z is within two node spacings of bX
};
/// ψ(z) = e^{λz} + single + cauchy for z outside X̄, with ∂̄ψ|bX = Φψ.
ExteriorValue exterior_extend(const BoundaryTrace& trace, const DtNData& dtn, cplx z);

}  // namespace dbar
