#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbar/boundary.hpp"
#include "dbar/gmres.hpp"
#include "dbar/kernel.hpp"

namespace dbar {

/// ψ|bX together with ∂ψ/∂λ̄ at the same nodes.
struct TraceWithDerivative {
  BoundaryTrace trace;
  Eigen::VectorXcd dbar_lambda;
};

enum class DbarMethod {
  analytic,          // differentiate the boundary equation: (I − K)∂_λ̄ψ = (∂_λ̄K)ψ
  finite_difference  // four-point stencil λ ± δ, λ ± iδ
};

TraceWithDerivative solve_psi_boundary_dbar(const DtNData& dtn, cplx lambda, DbarMethod method = DbarMethod::analytic,
                                            double fd_step = 1e-4);

/// b at one λ: ∂_λ̄ψ(z*)/conj ψ(z*) with z* the node of maximal |ψ|.
struct PointScattering {
  cplx b;
  int z_star = 0;
  double psi_at_z_star = 0.0;
  double consistency = 0.0;  // max_k |∂_λ̄ψ_k − b·conj ψ_k| / max_k |∂_λ̄ψ_k|
};
PointScattering scattering_at(const DtNData& dtn, cplx lambda, DbarMethod method = DbarMethod::analytic);

struct ScatteringData {
  enum Flag : std::uint8_t { ok = 0, exceptional = 1 };
  LambdaGrid grid;
  std::vector<cplx> b;
  std::vector<std::uint8_t> flags;
  std::string provenance;  // from-boundary | from-limit | synthetic | file
  nlohmann::json diagnostics = nlohmann::json::object();

  int size() const { return int(b.size()); }
};

struct ScatteringOptions {
  DbarMethod method = DbarMethod::analytic;
  double psi_threshold = 1e-8;  // |ψ(z*, λ)| below this marks an exceptional node
  int jobs = 1;
};

/// b on every node of `grid` from DtN data. Exceptional nodes are infilled by thin-plate
/// radial-basis interpolation from their unflagged neighbours.
ScatteringData b_from_dbar_lambda(const DtNData& dtn, const LambdaGrid& grid, const ScatteringOptions& opt = {});

/// Synthetic data b(λ) = f(λ) on a grid.
ScatteringData synthetic_scattering(const LambdaGrid& grid, const std::function<cplx(cplx)>& f);

/// Thin-plate spline infill of the flagged entries of `values` at `nodes` using the k nearest unflagged nodes.
void infill_flagged(const std::vector<cplx>& nodes, std::vector<cplx>& values, const std::vector<std::uint8_t>& flags,
                    int neighbours = 12);

/// Median of pairwise slopes.
double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Solution of μ(z,λ) = 1 + (1/π)∫ b(ξ) e^{ξ̄z̄−ξz} conj μ(z,ξ) / (λ − ξ) dA(ξ) on a cartesian λ-grid.
struct DbarSolution {
  cplx z;
  std::vector<cplx> mu;  // at grid.nodes
  ComplexField mu_full;  // on all n×n cells (b = 0 outside the disk)
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// Solver for one data set; the Cauchy kernel table is built once and shared across probe points.
class DbarSolver {
 public:
  explicit DbarSolver(const ScatteringData& data, GmresOptions opt = {});

  DbarSolution solve(cplx z) const;
  std::vector<DbarSolution> solve(const std::vector<cplx>& z, int jobs = 1) const;
  /// μ(z, λ) at an arbitrary λ (λ = 0 included): cubic interpolation inside the cell block,
  /// the discretized integral outside it.
  cplx evaluate(const DbarSolution& s, cplx lambda) const;
  /// First Born term (1/π)∫ b e^{ξ̄z̄−ξz}/(λ − ξ) at the grid nodes (same discretization).
  std::vector<cplx> born(cplx z) const;

  const ScatteringData& data() const { return data_; }
  const Grid2D& lambda_cells() const { return cells_; }

 private:
  ComplexField phase_b(cplx z) const;  // b(ξ) e^{ξ̄z̄ − ξz} on the cells

  ScatteringData data_;
  GmresOptions opt_;
  Grid2D cells_;
  ComplexField b_cells_;
  Convolver cauchy_;
};

/// Coefficients of the formal expansions in 1/λ (and 1/λ̄):
///   λa_k − (k−1)a_{k−1} = A_k,   λ̄b_k − (k−1)b_{k−1} = B_k,   a_0 = b_0 = 0.
template <class T>
std::vector<T> asymptotic_recurrence(const std::vector<T>& coeffs, const T& lambda) {
  if (lambda == T(0)) throw InputError("asymptotic_recurrence: λ = 0");
  if (coeffs.empty()) throw InputError("asymptotic_recurrence: need at least one coefficient");
  std::vector<T> a(coeffs.size());
  T prev = T(0);
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    prev = (coeffs[k - 1] + T(int(k) - 1) * prev) / lambda;
    a[k - 1] = prev;
  }
  return a;
}
std::vector<cplx> asymptotic_recurrence_conjugate(const std::vector<cplx>& coeffs, cplx lambda);

}  // namespace dbar
