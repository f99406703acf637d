#include "dbar/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dbar/parallel.hpp"

namespace dbar {

namespace {

// ∂_λ̄K: the λ̄-derivative of (i/2)A(Φ − Φ0). Only the anti-holomorphic half of
// G_λ = (1/π)(Ei(λv) + conj Ei(λv)) depends on λ̄, giving conj(e^{λv}/λ)/π, which is smooth at v = 0.
Eigen::MatrixXcd dbar_lambda_operator(const DtNData& dtn, cplx lambda) {
  const auto& nodes = dtn.nodes;
  const int n = dtn.size();
  Eigen::MatrixXcd a(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      a(k, j) = std::conj(std::exp(lambda * (nodes[k].point - nodes[j].point)) / lambda) / pi * nodes[j].weight;
  return boundary_prefactor * a * (dtn.phi - dtn.phi0);
}

}  // namespace

TraceWithDerivative solve_psi_boundary_dbar(const DtNData& dtn, cplx lambda, DbarMethod method, double fd_step) {
  const BoundarySystem sys(dtn, boundary_operator(dtn, lambda), lambda);
  TraceWithDerivative out{sys.trace(), {}};
  if (method == DbarMethod::analytic) {
    out.dbar_lambda = sys.solve(dbar_lambda_operator(dtn, lambda) * out.trace.psi);
    return out;
  }
  if (!(fd_step > 0.0)) throw InputError("solve_psi_boundary_dbar: finite-difference step must be positive");
  auto at = [&](cplx l) { return solve_psi_boundary(dtn, l).psi; };
  const Eigen::VectorXcd dx = (at(lambda + fd_step) - at(lambda - fd_step)) / (2 * fd_step);
  const Eigen::VectorXcd dy = (at(lambda + I * fd_step) - at(lambda - I * fd_step)) / (2 * fd_step);
  out.dbar_lambda = 0.5 * (dx + I * dy);
  return out;
}

PointScattering scattering_at(const DtNData& dtn, cplx lambda, DbarMethod method) {
  const auto t = solve_psi_boundary_dbar(dtn, lambda, method);
  PointScattering p;
  p.z_star = t.trace.z_star;
  const cplx psi = t.trace.psi[p.z_star];
  p.psi_at_z_star = std::abs(psi);
  p.b = t.dbar_lambda[p.z_star] / std::conj(psi);
  const double scale = t.dbar_lambda.cwiseAbs().maxCoeff();
  p.consistency = scale > 0 ? (t.dbar_lambda - p.b * t.trace.psi.conjugate()).cwiseAbs().maxCoeff() / scale : 0.0;
  return p;
}

double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("theil_sen_slope: size mismatch");
  std::vector<double> s;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[j] != x[i]) s.push_back((y[j] - y[i]) / (x[j] - x[i]));
  if (s.empty()) throw InputError("theil_sen_slope: need two distinct abscissae");
  const std::size_t mid = s.size() / 2;
  std::nth_element(s.begin(), s.begin() + mid, s.end());
  if (s.size() % 2) return s[mid];
  const double hi = s[mid];
  return 0.5 * (hi + *std::max_element(s.begin(), s.begin() + mid));
}

void infill_flagged(const std::vector<cplx>& nodes, std::vector<cplx>& values, const std::vector<std::uint8_t>& flags,
                    int neighbours) {
  std::vector<int> good;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (!flags[k]) good.push_back(int(k));
  const int m = std::min<int>(neighbours, int(good.size()));
  if (m < 3) {
    if (std::any_of(flags.begin(), flags.end(), [](auto f) { return f != 0; }))
      throw NumericalError("infill_flagged: fewer than three unflagged nodes");
    return;
  }
  auto tps = [](double r) { return r > 0 ? r * r * std::log(r) : 0.0; };
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!flags[k]) continue;
    std::vector<int> near = good;
    std::partial_sort(near.begin(), near.begin() + m, near.end(), [&](int a, int b) {
      return std::abs(nodes[a] - nodes[k]) < std::abs(nodes[b] - nodes[k]);
    });
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 3, m + 3);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m + 3);
    for (int i = 0; i < m; ++i) {
      const cplx p = nodes[near[i]];
      for (int j = 0; j < m; ++j) a(i, j) = tps(std::abs(p - nodes[near[j]]));
      a(i, m) = a(m, i) = 1.0;
      a(i, m + 1) = a(m + 1, i) = p.real();
      a(i, m + 2) = a(m + 2, i) = p.imag();
      rhs[i] = values[near[i]];
    }
    const Eigen::VectorXcd c = a.cast<cplx>().fullPivLu().solve(rhs);
    cplx v = c[m] + c[m + 1] * nodes[k].real() + c[m + 2] * nodes[k].imag();
    for (int i = 0; i < m; ++i) v += c[i] * tps(std::abs(nodes[k] - nodes[near[i]]));
    values[k] = v;
  }
}

namespace {

nlohmann::json decay_diagnostics(const ScatteringData& d) {
  std::vector<double> x, y;
  for (int k = 0; k < d.size(); ++k) {
    const double r = std::abs(d.grid.nodes[k]);
    if (r >= 1.0 && std::abs(d.b[k]) > 0 && !d.flags[k]) {
      x.push_back(std::log(r));
      y.push_back(std::log(std::abs(d.b[k])));
    }
  }
  nlohmann::json j;
  j["decay_nodes"] = x.size();
  if (x.size() >= 2 && *std::max_element(x.begin(), x.end()) > *std::min_element(x.begin(), x.end()))
    j["decay_slope"] = theil_sen_slope(x, y);
  return j;
}

}  // namespace

ScatteringData b_from_dbar_lambda(const DtNData& dtn, const LambdaGrid& grid, const ScatteringOptions& opt) {
  ScatteringData d;
  d.grid = grid;
  d.provenance = "from-boundary";
  const int n = grid.size();
  d.b.assign(n, cplx{});
  d.flags.assign(n, ScatteringData::ok);
  std::vector<double> consistency(n, 0.0);
  std::vector<std::string> reasons(n);
  parallel_for(n, opt.jobs, [&](int k) {
    const cplx l = grid.nodes[k];
    if (l == cplx{}) {
      d.flags[k] = ScatteringData::exceptional;
      reasons[k] = "λ = 0";
      return;
    }
    try {
      const auto p = scattering_at(dtn, l, opt.method);
      d.b[k] = p.b;
      consistency[k] = p.consistency;
      if (p.psi_at_z_star < opt.psi_threshold) {
        d.flags[k] = ScatteringData::exceptional;
        reasons[k] = "|ψ(z*)| below threshold";
      }
    } catch (const NumericalError& e) {
      d.flags[k] = ScatteringData::exceptional;
      reasons[k] = e.what();
    }
  });
  nlohmann::json flagged = nlohmann::json::array();
  for (int k = 0; k < n; ++k)
    if (d.flags[k])
      flagged.push_back({{"lambda", {grid.nodes[k].real(), grid.nodes[k].imag()}}, {"reason", reasons[k]}});
  infill_flagged(grid.nodes, d.b, d.flags);
  d.diagnostics = decay_diagnostics(d);
  d.diagnostics["method"] = opt.method == DbarMethod::analytic ? "analytic" : "finite-difference";
  d.diagnostics["exceptional"] = flagged;
  d.diagnostics["max_consistency"] = n ? *std::max_element(consistency.begin(), consistency.end()) : 0.0;
  d.diagnostics["boundary_nodes"] = dtn.size();
  return d;
}

ScatteringData synthetic_scattering(const LambdaGrid& grid, const std::function<cplx(cplx)>& f) {
  ScatteringData d;
  d.grid = grid;
  d.provenance = "synthetic";
  d.flags.assign(grid.size(), ScatteringData::ok);
  for (cplx l : grid.nodes) d.b.push_back(f(l));
  return d;
}

namespace {

Grid2D cells_for(const ScatteringData& d) {
  if (d.grid.kind != LambdaGrid::Kind::cartesian) throw InputError("DbarSolver: needs a cartesian λ-grid");
  if (int(d.b.size()) != d.grid.size()) throw InputError("DbarSolver: b does not match the λ-grid");
  return Grid2D(d.grid.n, d.grid.radius);
}

}  // namespace

DbarSolver::DbarSolver(const ScatteringData& data, GmresOptions opt)
    : data_(data),
      opt_(opt),
      cells_(cells_for(data)),
      b_cells_(cells_.czeros()),
      cauchy_(cells_.n, [h = cells_.spacing()](int dx, int dy) -> cplx {
        if (dx == 0 && dy == 0) return {};  // principal value over the self cell vanishes by symmetry
        return h / (pi * cplx(dx, dy));
      }) {
  for (int k = 0; k < data_.size(); ++k) {
    const auto [i, j] = data_.grid.cell(k);
    b_cells_(i, j) = data_.b[k];
  }
}

ComplexField DbarSolver::phase_b(cplx z) const {
  ComplexField p = b_cells_;
  for (int j = 0; j < cells_.n; ++j)
    for (int i = 0; i < cells_.n; ++i)
      if (p(i, j) != cplx{}) {
        const cplx xi = cells_.point(i, j);
        p(i, j) *= std::exp(std::conj(xi) * std::conj(z) - xi * z);
      }
  return p;
}

namespace {

DbarSolution solve_with(const DbarSolver& s, const Convolver& cauchy, const ComplexField& pb, cplx z,
                        const GmresOptions& opt) {
  const int n = s.lambda_cells().n;
  DbarSolution out;
  out.z = z;
  auto apply = [&](const Eigen::VectorXd& x) {
    const ComplexField m = unpack(x, n, n);
    return Eigen::VectorXd(pack(m - cauchy.apply(pb * m.conjugate())));
  };
  const Eigen::VectorXd rhs = pack(ComplexField::Ones(n, n));
  const GmresResult r = gmres(apply, rhs, rhs, opt);
  out.converged = r.converged;
  out.iterations = r.iterations;
  out.residual = r.relative_residual;
  out.history = r.history;
  if (!r.converged)
    throw NumericalError("DbarSolver: GMRES did not converge at z = (" + std::to_string(z.real()) + ", " +
                             std::to_string(z.imag()) + "), residual " + std::to_string(r.relative_residual),
                         r.history);
  out.mu_full = unpack(r.x, n, n);
  const auto& g = s.data().grid;
  out.mu.resize(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const auto [i, j] = g.cell(k);
    out.mu[k] = out.mu_full(i, j);
  }
  return out;
}

}  // namespace

DbarSolution DbarSolver::solve(cplx z) const { return solve_with(*this, cauchy_, phase_b(z), z, opt_); }

std::vector<DbarSolution> DbarSolver::solve(const std::vector<cplx>& z, int jobs) const {
  std::vector<DbarSolution> out(z.size());
  // FFTW work buffers are per-Convolver, so every task works on its own copy.
  parallel_for(int(z.size()), jobs, [&](int k) {
    const Convolver local(cauchy_);
    out[k] = solve_with(*this, local, phase_b(z[k]), z[k], opt_);
  });
  return out;
}

cplx DbarSolver::evaluate(const DbarSolution& s, cplx lambda) const {
  // inside the cell block the nodal solution is interpolated: a direct sum would see the Cauchy
  // singularity at first order only. μ − 1 is interpolated so that b ≡ 0 gives μ ≡ 1 exactly.
  const ComplexField deviation = s.mu_full - cplx(1.0);
  if (auto v = interpolate_cubic(cells_, deviation, lambda)) return 1.0 + *v;
  const ComplexField pb = phase_b(s.z);
  const double a = cells_.cell_area();
  cplx acc{};
  for (int j = 0; j < cells_.n; ++j)
    for (int i = 0; i < cells_.n; ++i) {
      if (pb(i, j) == cplx{}) continue;
      const cplx d = lambda - cells_.point(i, j);
      if (std::abs(d) < 1e-12 * cells_.spacing()) continue;
      acc += pb(i, j) * std::conj(s.mu_full(i, j)) / d;
    }
  return 1.0 + acc * a / pi;
}

std::vector<cplx> DbarSolver::born(cplx z) const {
  const ComplexField c = cauchy_.apply(phase_b(z));
  const auto& g = data_.grid;
  std::vector<cplx> out(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const auto [i, j] = g.cell(k);
    out[k] = c(i, j);
  }
  return out;
}

std::vector<cplx> asymptotic_recurrence_conjugate(const std::vector<cplx>& coeffs, cplx lambda) {
  return asymptotic_recurrence(coeffs, std::conj(lambda));
}

}  // namespace dbar
