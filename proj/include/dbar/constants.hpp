#pragma once

// Conventions shared by every module.
//
// Coordinates: z = x + iy, ∂ = (∂x − i∂y)/2, ∂̄ = (∂x + i∂y)/2, so ∂∂̄ = Δ/4.
// Area element dA = dx dy, and dz∧dz̄ = −2i dA.
//
// d^c = i(∂̄ − ∂) and dd^c f = 2i ∂∂̄f dz∧dz̄ = Δf dA. Potentials are stored as
// densities q̂ with dd^c√σ/√σ = q̂ dA, i.e. q̂ = Δ√σ/√σ.
//
// The Schrödinger form dd^cψ = qψ with ψ = e^{λz}μ reads, as densities,
//   ∂̄(∂ + λ)μ = q̂μ/4.
// E_λ denotes the fundamental solution ∂̄(∂ + λ)E_λ = δ that decays at infinity:
//   E_λ(v) = e^{−λv} G_λ(v),  G_λ(v) = (2/π) Re Ei(λv),
// and the Faddeev integral equation is μ = 1 + E_λ * (q̂μ/4). The Fourier-integral
// normalization g(z,λ) = (i/(2(2π)²))∫ e^{i(wz̄+w̄z)} dw∧dw̄ / (w(w̄−iλ)) equals −E_λ/4.
//
// Derivatives of the kernel are elementary:
//   ∂_v G_λ = e^{λv}/(πv),  ∂_v̄ G_λ = e^{λ̄v̄}/(πv̄),  ∂_λ̄ G_λ = conj(e^{λv}/λ)/π.
//
// Boundary data: Φψ is the arclength density of the (0,1)-form ∂̄ψ̃ restricted to bX,
//   Φψ = ∂_z̄ψ̃ · dz̄/ds = −(i/2)(∂_νψ̃ + i∂_τψ),
// so (Φ − Φ0)ψ = −(i/2)(Λ_σ − Λ_1)ψ with Λ the conductivity Dirichlet-to-Neumann map.
// Green's identity then gives, for z ∈ bX,
//   ψ(z) = e^{λz} + (i/2) ∮ G_λ(z,ξ)(Φ − Φ0)ψ(ξ) ds(ξ),
// and for z outside X̄,
//   ψ(z) = e^{λz} + (i/2) ∮ [G_λ(z,ξ) ∂̄ψ(ξ) + ψ(ξ) ∂_ξ G_λ(z,ξ)],
// where the bracket is a 1-form integrated along the positively oriented boundary.
//
// Scattering data: b(λ) = lim z̄/λ̄ · e^{λz−λ̄z̄} ∂_z̄μ = t(λ)/(4πλ̄) with
// t(λ) = ∫ e^{λz−λ̄z̄} q̂ μ dA. The λ-equation ∂_λ̄μ = b e^{λ̄z̄−λz} μ̄ is inverted by
//   μ(z,λ) = 1 + (1/π) ∫ b(ξ) e^{ξ̄z̄−ξz} μ̄(z,ξ) / (λ − ξ) dA(ξ).
//
// Reconstruction formulas as densities:
//   A: q̂ = Δψ/ψ,   B: q̂ = lim_{λ→∞} 4λ e^{−λz} ∂_z̄ψ,   C: q̂ = lim_{λ→0} 4∂∂̄μ/μ.

#include <complex>
#include <numbers>

namespace dbar {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;
inline constexpr cplx I{0.0, 1.0};

/// Mean of log|u| over the unit square [-1/2, 1/2]^2 (self-cell correction for log kernels).
inline constexpr double mean_log_unit_square = -1.0611754268825244;

/// Green–Riemann/Green identity prefactor in front of the boundary integral.
inline constexpr cplx boundary_prefactor{0.0, 0.5};

/// Scale factor from the density potential q̂ to the right-hand side of ∂̄(∂+λ)μ = q̂μ/4.
inline constexpr double potential_scale = 0.25;

}  // namespace dbar
