#include "dbar/faddeev.hpp"

#include <cmath>
#include <optional>

#include "dbar/parallel.hpp"

namespace dbar {

ComplexField FaddeevSlice::psi() const {
  const ComplexField z = grid.sample([](cplx w) { return w; });
  return (lambda * z).exp() * mu;
}

FaddeevSlice solve_mu_interior(const PotentialField& q, cplx lambda, const GmresOptions& opt) {
  if (lambda == cplx{}) throw InputError("solve_mu_interior: λ = 0 is excluded (singular kernel)");
  const Grid2D& g = q.grid;
  FaddeevSlice s;
  s.lambda = lambda;
  s.grid = g;
  const ComplexField qc = (potential_scale * q.q).cast<cplx>();
  if ((q.q == 0.0).all()) {
    s.mu = ComplexField::Ones(g.n, g.n);
    s.source = g.czeros();
    s.converged = true;
    s.history = {0.0};
    return s;
  }
  const Convolver conv = PlanarKernel::table(g, lambda);
  auto apply = [&](const Eigen::VectorXd& x) {
    const ComplexField m = unpack(x, g.n, g.n);
    return Eigen::VectorXd(pack(m - conv.apply(qc * m)));
  };
  const Eigen::VectorXd rhs = pack(ComplexField::Ones(g.n, g.n));
  const GmresResult r = gmres(apply, rhs, rhs, opt);
  s.converged = r.converged;
  s.iterations = r.iterations;
  s.residual = r.relative_residual;
  s.history = r.history;
  if (!r.converged)
    throw NumericalError("solve_mu_interior: GMRES did not converge at λ = (" + std::to_string(lambda.real()) + ", " +
                             std::to_string(lambda.imag()) + "), residual " + std::to_string(r.relative_residual) +
                             " (possible exceptional point or under-resolved grid)",
                         r.history);
  s.mu = unpack(r.x, g.n, g.n);
  s.source = qc * s.mu;
  double dev = 0.0;
  for (int k = 0; k < g.n; ++k)
    for (cplx v : {s.mu(k, 0), s.mu(k, g.n - 1), s.mu(0, k), s.mu(g.n - 1, k)}) dev = std::max(dev, std::abs(v - 1.0));
  s.outer_ring_deviation = dev;
  return s;
}

FaddeevSlice solve_mu_interior(const ConductivityField& sigma, cplx lambda, const Grid2D& grid,
                               const GmresOptions& opt) {
  return solve_mu_interior(potential_q(sigma, grid), lambda, opt);
}

FaddeevField solve_mu_sweep(const PotentialField& q, const std::vector<cplx>& lambdas, int jobs,
                            const GmresOptions& opt) {
  FaddeevField f;
  f.lambdas = lambdas;
  f.slices.resize(lambdas.size());
  parallel_for(int(lambdas.size()), jobs, [&](int k) { f.slices[k] = solve_mu_interior(q, lambdas[k], opt); });
  return f;
}

namespace {

template <class K>
cplx sum_source(const FaddeevSlice& s, K&& kernel) {
  const Grid2D& g = s.grid;
  cplx acc{};
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i)
      if (s.source(i, j) != cplx{}) acc += kernel(i, j) * s.source(i, j);
  return acc * g.cell_area();
}

}  // namespace

cplx mu_at(const FaddeevSlice& s, cplx z) {
  // inside the grid the nodal field is smooth and the summation would see the log singularity
  if (auto v = interpolate_cubic(s.grid, s.mu, z)) return *v;
  const double h = s.grid.spacing();
  const cplx self = self_cell_value(s.lambda, h);
  return 1.0 + sum_source(s, [&](int i, int j) {
           const cplx v = z - s.grid.point(i, j);
           return std::abs(v) < 1e-12 * h ? self : faddeev_e(v, s.lambda);
         });
}

cplx dzbar_mu_at(const FaddeevSlice& s, cplx z) {
  // ∂_v̄ E_λ(v) = e^{−λv + λ̄v̄}/(π v̄)
  const cplx l = s.lambda;
  return sum_source(s, [&](int i, int j) {
    const cplx v = z - s.grid.point(i, j);
    if (std::abs(v) < 1e-12 * s.grid.spacing()) return cplx{};
    return std::exp(-l * v + std::conj(l * v)) / (pi * std::conj(v));
  });
}

LimitEstimate b_from_limit(const FaddeevSlice& s, double support_radius, double inner, double outer, int circles,
                           int angles) {
  if (!(inner > support_radius)) throw InputError("b_from_limit: annulus intersects the support of q");
  if (!(outer >= inner) || circles < 1 || angles < 8) throw InputError("b_from_limit: bad annulus parameters");
  const cplx l = s.lambda;
  LimitEstimate est;
  cplx mean{};
  for (int c = 0; c < circles; ++c) {
    const double r = circles == 1 ? inner : inner + (outer - inner) * c / (circles - 1);
    cplx acc{};
    for (int k = 0; k < angles; ++k) {
      const cplx z = std::polar(r, 2 * pi * (k + 0.5) / angles);
      acc += std::conj(z) * std::exp(l * z - std::conj(l * z)) * dzbar_mu_at(s, z);
    }
    est.radii.push_back(r);
    est.circle_values.push_back(acc / double(angles));
    mean += est.circle_values.back();
  }
  mean /= double(circles);
  est.b = mean / std::conj(l);
  if (mean != cplx{}) {
    for (cplx v : est.circle_values) est.dispersion = std::max(est.dispersion, std::abs(v - mean) / std::abs(mean));
  }
  est.flagged = est.dispersion > 0.1;
  return est;
}

double lp_norm(const ComplexField& f, const Grid2D& grid, double p) {
  return std::pow(f.abs().pow(p).sum() * grid.cell_area(), 1.0 / p);
}

}  // namespace dbar
