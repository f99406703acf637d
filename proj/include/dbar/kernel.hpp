#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dbar/fft.hpp"
#include "dbar/grid.hpp"

namespace dbar {

/// E_λ(v): fundamental solution of ∂̄(∂ + λ) decaying at infinity; λ = 0 gives (2/π) ln|v|.
cplx faddeev_e(cplx v, cplx lambda);

/// g(z, λ) in the Fourier-integral normalization, g = −E_λ/4. Throws for z = 0 or λ = 0.
cplx eval_g_planar(cplx z, cplx lambda);

/// Cell average of E_λ over the h×h cell centred at the singularity (leading logarithmic terms).
cplx self_cell_value(cplx lambda, double h);

struct GreenApplication {
  ComplexField u;
  // λ = 0 only: mean of u over the outermost grid ring. The log kernel does not decay, so
  // u → 0 holds only after subtracting this constant.
  cplx boundary_constant{};
  double edge_mass_fraction = 0.0;  // share of ∫|φ| carried by the two outermost rings
  std::vector<std::string> warnings;
};

/// Pluggable Green operator: pointwise kernel and fast application to gridded densities.
class GreenKernel {
 public:
  enum class Kind { planar, external_table };
  virtual ~GreenKernel() = default;
  virtual Kind kind() const = 0;
  /// E_λ(z, ξ) such that ∂̄_z(∂_z + λ)E_λ(·, ξ) = δ_ξ.
  virtual cplx eval(cplx z, cplx xi, cplx lambda) const = 0;
  /// u(z) = ∫ E_λ(z, ξ) φ(ξ) dA(ξ) on the nodes of `grid`.
  virtual GreenApplication apply(const ComplexField& phi, const Grid2D& grid, cplx lambda) const = 0;
};

/// Translation-invariant planar kernel; application by zero-padded FFT convolution.
class PlanarKernel final : public GreenKernel {
 public:
  Kind kind() const override { return Kind::planar; }
  cplx eval(cplx z, cplx xi, cplx lambda) const override { return faddeev_e(z - xi, lambda); }
  GreenApplication apply(const ComplexField& phi, const Grid2D& grid, cplx lambda) const override;

  /// Convolution table for one (grid, λ); immutable and reusable across densities.
  static Convolver table(const Grid2D& grid, cplx lambda);
};

/// Kernel supplied as samples E_λ(z_a, ξ_b) for one λ, e.g. from a curve of positive genus.
/// Application requires the ξ nodes to be the grid nodes in column-major order.
class TableKernel final : public GreenKernel {
 public:
  TableKernel(cplx lambda, std::vector<cplx> z_nodes, std::vector<cplx> xi_nodes, Eigen::MatrixXcd values,
              std::string convention = "E");
  Kind kind() const override { return Kind::external_table; }
  cplx eval(cplx z, cplx xi, cplx lambda) const override;
  GreenApplication apply(const ComplexField& phi, const Grid2D& grid, cplx lambda) const override;

  cplx lambda() const { return lambda_; }
  const std::vector<cplx>& z_nodes() const { return z_; }
  const std::vector<cplx>& xi_nodes() const { return xi_; }
  const Eigen::MatrixXcd& values() const { return values_; }
  const std::string& convention() const { return convention_; }

 private:
  cplx lambda_;
  std::vector<cplx> z_, xi_;
  Eigen::MatrixXcd values_;
  std::string convention_;
};

/// E_λ * φ with the planar kernel.
GreenApplication apply_greens(const ComplexField& phi, const Grid2D& grid, cplx lambda);

/// Spectral nodes with quadrature weights; never contains 0 and is closed under conjugation.
struct LambdaGrid {
  enum class Kind { polar, cartesian, list };
  Kind kind = Kind::cartesian;
  double radius = 0.0;
  int n = 0;       // cartesian: nodes per side; polar: radial nodes
  int angles = 0;  // polar only
  std::vector<cplx> nodes;
  std::vector<double> weights;

  /// Cell-centred n×n grid on [−R, R]², nodes outside |λ| ≤ R dropped; n even.
  static LambdaGrid cartesian(int n, double radius);
  /// Midpoint radii in (0, R] × angles (k + 1/2)·2π/m.
  static LambdaGrid polar(int n, int m, double radius);
  /// Arbitrary nodes and quadrature weights; InputError unless the set is closed under conjugation.
  static LambdaGrid from_nodes(std::vector<cplx> nodes, std::vector<double> weights);

  int size() const { return int(nodes.size()); }
  double spacing() const { return 2.0 * radius / n; }
  /// Index of conj(nodes[k]).
  int conjugate_index(int k) const { return conj_[k]; }
  /// Cartesian and polar: (i, j) cell indices of node k.
  std::pair<int, int> cell(int k) const { return cells_[k]; }

 private:
  std::vector<int> conj_;
  std::vector<std::pair<int, int>> cells_;
  void finish();
};

}  // namespace dbar
