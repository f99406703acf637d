#pragma once

#include <functional>
#include <map>
#include <string>

#include <json.hpp>

#include "dbar/grid.hpp"

namespace dbar {

/// Pointwise value and derivatives of a smooth real function of z = x + iy.
struct Jet {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double laplacian = 0.0;
};

/// Sixth-order central differences of f at z with step `step`.
Jet differentiate(const std::function<double(cplx)>& f, cplx z, double step = 1e-3);

/// Isotropic conductivity σ > 0 with σ ≡ 1 for |z| ≥ support_radius.
class ConductivityField {
 public:
  ConductivityField(std::string name, std::function<double(cplx)> sigma, double support_radius,
                    int smoothness = 3, nlohmann::json params = {});

  const std::string& name() const { return name_; }
  const nlohmann::json& params() const { return params_; }
  double support_radius() const { return support_radius_; }
  int smoothness() const { return smoothness_; }
  bool is_constant() const { return name_ == "constant"; }

  double operator()(cplx z) const { return sigma_(z); }
  double sqrt_sigma(cplx z) const { return std::sqrt(sigma_(z)); }
  Jet jet(cplx z) const;
  Jet sqrt_jet(cplx z) const;
  Jet log_sqrt_jet(cplx z) const;

  /// Minimum of σ over a uniform sampling of the disk of the given radius.
  double sampled_minimum(double radius, int n = 201) const;

 private:
  std::string name_;
  std::function<double(cplx)> sigma_;
  double support_radius_;
  int smoothness_;
  nlohmann::json params_;
};

/// C∞ cutoff in r: 1 for r ≤ inner, 0 for r ≥ outer.
double smooth_cutoff(double r, double inner, double outer);

/// Presets: constant | gaussian {amp, center:[x,y], width} | two_bump {bumps:[{amp,center,width}×2]}
/// | annulus {amp, radius, width}. `domain_radius` sets the collar, σ ≡ 1 for |z| ≥ 0.95·domain_radius.
ConductivityField make_phantom(const std::string& name, const nlohmann::json& params = {},
                               double domain_radius = 1.0);

/// Grid samples of σ and √σ together with the first/second derivatives of √σ and log√σ.
struct ConductivitySamples {
  Grid2D grid;
  RealField sigma, sqrt_sigma, log_sqrt;
  RealField sqrt_dx, sqrt_dy, sqrt_laplacian;
  RealField log_sqrt_dx, log_sqrt_dy;
};
ConductivitySamples sample(const ConductivityField& s, const Grid2D& grid);

/// q̂ = Δ√σ/√σ, the density of dd^c√σ/√σ against dx dy.
struct PotentialField {
  Grid2D grid;
  RealField q;
  RealField support;  // 1 inside the σ-support disk, 0 elsewhere
  double integral() const { return q.sum() * grid.cell_area(); }
};
PotentialField potential_q(const ConductivityField& s, const Grid2D& grid);

/// First-order form of the conductivity equation for a field f at spectral parameter λ.
struct FirstOrderReduction {
  cplx lambda;
  Grid2D grid;
  ComplexField f1, f2;        // √σ ∂f, √σ ∂̄f
  ComplexField m1, m2;        // e^{−λz} f1, e^{−λz} f2
  ComplexField u_plus, u_minus;
  ComplexField q1;            // −∂ log√σ
  ComplexField phase;         // e^{−λz + λ̄z̄}, unimodular

  /// max |∂̄f1 − q1 f2| + max |∂f2 − q̄1 f1| over nodes at least `margin` cells from the edge
  /// and inside |z| < radius.
  double residual_f(double radius, int margin = 2) const;
  /// max |∂̄m1 − q1 m2| + max |∂m2 + λm2 − q̄1 m1|.
  double residual_m(double radius, int margin = 2) const;
  /// max |∂̄u± ∓ q1 e^{−λz+λ̄z̄} ū±|.
  double residual_u(double radius, int margin = 2) const;
};
FirstOrderReduction first_order_reduction(const ComplexField& f, const ConductivityField& s, cplx lambda,
                                          const Grid2D& grid);

}  // namespace dbar
