#include "dbar/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dbar/parallel.hpp"

namespace dbar {

std::string to_string(Formula f) {
  switch (f) {
    case Formula::A: return "A";
    case Formula::B: return "B";
    case Formula::C: return "C";
  }
  return "?";
}

Formula parse_formula(const std::string& s) {
  if (s == "A") return Formula::A;
  if (s == "B") return Formula::B;
  if (s == "C") return Formula::C;
  throw InputError("unknown reconstruction formula '" + s + "' (expected A, B or C)");
}

namespace {

constexpr int stencil_margin = 2;

// Fourth-order centred differences; nodes within two cells of the edge are left at zero and
// excluded through the mask.
struct Derivatives {
  ComplexField laplacian, dzbar;
};

Derivatives derivatives(const ComplexField& f, double h) {
  const int n = int(f.rows());
  Derivatives d{ComplexField::Zero(n, n), ComplexField::Zero(n, n)};
  for (int j = stencil_margin; j < n - stencil_margin; ++j)
    for (int i = stencil_margin; i < n - stencil_margin; ++i) {
      const cplx fx = (-f(i + 2, j) + 8.0 * f(i + 1, j) - 8.0 * f(i - 1, j) + f(i - 2, j)) / (12 * h);
      const cplx fy = (-f(i, j + 2) + 8.0 * f(i, j + 1) - 8.0 * f(i, j - 1) + f(i, j - 2)) / (12 * h);
      const cplx fxx = (-f(i + 2, j) + 16.0 * f(i + 1, j) - 30.0 * f(i, j) + 16.0 * f(i - 1, j) - f(i - 2, j)) / (12 * h * h);
      const cplx fyy = (-f(i, j + 2) + 16.0 * f(i, j + 1) - 30.0 * f(i, j) + 16.0 * f(i, j - 1) - f(i, j - 2)) / (12 * h * h);
      d.laplacian(i, j) = fxx + fyy;
      d.dzbar(i, j) = 0.5 * (fx + I * fy);
    }
  return d;
}

RealField region_mask(const Grid2D& g, double radius) {
  RealField m = g.zeros();
  for (int j = stencil_margin; j < g.n - stencil_margin; ++j)
    for (int i = stencil_margin; i < g.n - stencil_margin; ++i) m(i, j) = std::abs(g.point(i, j)) < radius ? 1.0 : 0.0;
  return m;
}

double masked_norm(const ComplexField& f, const RealField& mask) {
  return std::sqrt((f.abs2() * mask).sum());
}

struct Sample {
  cplx lambda;
  ComplexField value;
};

// Per-node least-squares fit v_k = q + c·t_k; returns q.
ComplexField fit_limit(const std::vector<Sample>& s, const std::vector<cplx>& t) {
  const cplx tm = std::accumulate(t.begin(), t.end(), cplx{}) / double(t.size());
  double den = 0.0;
  for (cplx x : t) den += std::norm(x - tm);
  if (den == 0.0) throw InputError("q_from_psi: extrapolation needs distinct λ values");
  ComplexField vm = ComplexField::Zero(s[0].value.rows(), s[0].value.cols());
  for (const auto& x : s) vm += x.value;
  vm /= double(s.size());
  ComplexField c = ComplexField::Zero(vm.rows(), vm.cols());
  for (std::size_t k = 0; k < s.size(); ++k) c += std::conj(t[k] - tm) * (s[k].value - vm);
  c /= den;
  return vm - c * tm;
}

}  // namespace

QReconstruction q_from_psi(const FaddeevField& fields, Formula formula, const QOptions& opt) {
  const auto& slices = fields.slices;
  if (slices.empty()) throw InputError("q_from_psi: no Faddeev fields");
  const Grid2D g = slices[0].grid;
  for (const auto& s : slices)
    if (s.grid.n != g.n || s.grid.half_width != g.half_width || s.grid.center != g.center)
      throw InputError("q_from_psi: slices live on different grids");
  const int need = formula == Formula::A ? 1 : formula == Formula::B ? 3 : 2;
  const bool has_zero = std::any_of(slices.begin(), slices.end(), [](const auto& s) { return s.lambda == cplx{}; });
  if (formula == Formula::A && slices.size() != 1) throw InputError("q_from_psi: formula A takes a single λ");
  if (formula == Formula::A && has_zero) throw InputError("q_from_psi: formula A needs λ ≠ 0");
  if (int(slices.size()) < need && !(formula == Formula::C && has_zero))
    throw InputError("q_from_psi: formula " + to_string(formula) + " needs at least " + std::to_string(need) + " λ values");

  QReconstruction out;
  out.formula = formula;
  out.grid = g;
  const double h = g.spacing();
  const RealField region = region_mask(g, opt.region_radius);
  out.mask = region;
  std::vector<Sample> samples;
  for (const auto& s : slices) {
    out.lambdas.push_back(s.lambda);
    const Derivatives d = derivatives(s.mu, h);
    ComplexField v(g.n, g.n);
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const cplx mu = s.mu(i, j);
        switch (formula) {
          case Formula::A:
            // Δψ/ψ = (Δμ + 4λ∂̄μ)/μ for ψ = e^{λz}μ
            if (std::abs(std::exp(s.lambda * g.point(i, j)) * mu) < opt.psi_threshold) out.mask(i, j) = 0.0;
            v(i, j) = (d.laplacian(i, j) + 4.0 * s.lambda * d.dzbar(i, j)) / mu;
            break;
          case Formula::B:
            v(i, j) = 4.0 * s.lambda * d.dzbar(i, j);
            break;
          case Formula::C:
            if (std::abs(mu) < opt.mu_threshold) out.mask(i, j) = 0.0;
            v(i, j) = d.laplacian(i, j) / mu;
            break;
        }
      }
    samples.push_back({s.lambda, std::move(v)});
  }

  const double region_nodes = region.sum();
  out.coverage = region_nodes > 0 ? out.mask.sum() / region_nodes : 0.0;
  if (out.coverage < opt.min_coverage)
    throw NumericalError("q_from_psi: only " + std::to_string(100 * out.coverage) +
                         "% of X is usable; |ψ| or |μ| vanishes on the rest (zero set)");

  ComplexField q;
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  if (formula == Formula::A) {
    q = samples[0].value;
  } else if (formula == Formula::C && has_zero) {
    for (const auto& s : samples)
      if (s.lambda == cplx{}) q = s.value;
  } else if (formula == Formula::B) {
    // Pointwise along one ray 4λ∂̄μ carries an O(1/|λ|) term with phase e^{λ̄z̄−λz}; averaging over
    // the directions supplied at each modulus removes it, after which the error is no longer
    // algebraic in 1/|λ| (Richardson steps make it worse), so the limit is read off the largest ring.
    std::vector<std::pair<double, ComplexField>> rings;
    std::vector<int> counts;
    for (const auto& x : samples) {
      const double r = std::abs(x.lambda);
      auto it = std::find_if(rings.begin(), rings.end(), [&](const auto& g) { return std::abs(g.first - r) <= 1e-9 * r; });
      if (it == rings.end()) {
        rings.emplace_back(r, x.value);
        counts.push_back(1);
      } else {
        it->second += x.value;
        ++counts[it - rings.begin()];
      }
    }
    if (rings.size() < 3) throw InputError("q_from_psi: formula B needs at least 3 distinct |λ|");
    for (std::size_t k = 0; k < rings.size(); ++k) rings[k].second /= double(counts[k]);
    std::sort(rings.begin(), rings.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    q = rings.back().second;
    const double qn = masked_norm(q, out.mask);
    out.extrapolation_spread = qn > 0 ? masked_norm(rings[rings.size() - 2].second - q, out.mask) / qn : 0.0;
    for (std::size_t k = 1; k + 1 < rings.size(); ++k)
      if (masked_norm(rings[k].second - q, out.mask) > masked_norm(rings[k - 1].second - q, out.mask)) {
        out.warning = "unreliable limit: ring averages do not approach the largest-|λ| value monotonically";
        break;
      }
  } else {
    // formula C: linear extrapolation v = q + c·λ to λ = 0
    std::vector<cplx> t;
    for (const auto& s : samples) t.push_back(s.lambda);
    q = fit_limit(samples, t);
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return std::abs(samples[a].lambda) > std::abs(samples[b].lambda); });
    const double qn = masked_norm(q, out.mask);
    std::vector<double> dev;
    for (auto k : order) dev.push_back(masked_norm(samples[k].value - q, out.mask));
    out.extrapolation_spread = qn > 0 ? dev.back() / qn : 0.0;
    for (std::size_t k = 1; k < dev.size(); ++k)
      if (dev[k] > dev[k - 1]) {
        out.warning = "unreliable limit: deviation from the extrapolated value is not monotone over the λ-set";
        break;
      }
  }
  out.q = q.real() * out.mask;
  const double re = masked_norm(q.real().cast<cplx>(), out.mask);
  const double im = masked_norm(q.imag().cast<cplx>(), out.mask);
  out.imaginary_ratio = re > 0 ? im / re : (im > 0 ? INFINITY : 0.0);
  return out;
}

std::vector<cplx> b_lambda_set(const std::vector<double>& moduli, int directions) {
  std::vector<cplx> out;
  for (double r : moduli)
    for (int k = 0; k < directions; ++k) out.push_back(std::polar(r, 2 * pi * (k + 0.5) / directions));
  return out;
}

SigmaReconstruction sigma_from_q(const RealField& q, const Grid2D& grid, double radius, const SigmaOptions& opt) {
  if (!(radius > 0)) throw InputError("sigma_from_q: radius must be positive");
  if (grid.half_width < radius) throw InputError("sigma_from_q: grid does not cover the disk");
  const ComplexField qc = q.cast<cplx>();
  auto scaled = [&](cplx y) { return radius * radius * interpolate_cubic(grid, qc, radius * y, true)->real(); };
  const PolarSolver solver = PolarSolver::schrodinger(scaled, {opt.radial_degree, opt.angular});
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(solver.angular());
  const Eigen::MatrixXd u = solver.solve(one);
  const auto w = solver.interpolator(one, u);
  SigmaReconstruction out;
  out.grid = grid;
  out.sigma = RealField::Ones(grid.n, grid.n);
  out.w_min = std::min(1.0, u.minCoeff());
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      const cplx z = grid.point(i, j);
      if (std::abs(z) >= radius) continue;
      const double v = w(z / radius);
      out.w_min = std::min(out.w_min, v);
      out.sigma(i, j) = v * v;
    }
  if (!(out.w_min > 0))
    throw NumericalError("sigma_from_q: w = √σ is not positive (min " + std::to_string(out.w_min) +
                         "); q̂ is not the potential of a conductivity");
  return out;
}

nlohmann::json ErrorReport::to_json() const {
  nlohmann::json j{{"rel_l2", rel_l2}, {"rel_linf", rel_linf}};
  if (bump_amplitude_error) j["bump_amplitude_error"] = *bump_amplitude_error;
  if (bump_center_error) j["bump_center_error"] = *bump_center_error;
  return j;
}

ErrorReport error_metrics(const RealField& rec, const RealField& truth, const Grid2D& grid, double radius,
                          std::optional<cplx> bump_center) {
  if (rec.rows() != grid.n || truth.rows() != grid.n || rec.cols() != grid.n || truth.cols() != grid.n)
    throw InputError("error_metrics: fields do not match the grid");
  double d2 = 0, t2 = 0, dinf = 0, tinf = 0;
  double peak_rec = 1, peak_true = 1;
  cplx where{};
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      if (std::abs(grid.point(i, j)) >= radius) continue;
      const double d = rec(i, j) - truth(i, j);
      d2 += d * d;
      t2 += truth(i, j) * truth(i, j);
      dinf = std::max(dinf, std::abs(d));
      tinf = std::max(tinf, std::abs(truth(i, j)));
      if (std::abs(rec(i, j) - 1) > std::abs(peak_rec - 1)) {
        peak_rec = rec(i, j);
        where = grid.point(i, j);
      }
      if (std::abs(truth(i, j) - 1) > std::abs(peak_true - 1)) peak_true = truth(i, j);
    }
  ErrorReport r;
  r.rel_l2 = t2 > 0 ? std::sqrt(d2 / t2) : std::sqrt(d2);
  r.rel_linf = tinf > 0 ? dinf / tinf : dinf;
  if (bump_center) {
    r.bump_center_error = std::abs(where - *bump_center);
    const double contrast = std::abs(peak_true - 1);
    r.bump_amplitude_error = contrast > 0 ? std::abs(peak_rec - peak_true) / contrast : std::abs(peak_rec - peak_true);
  }
  return r;
}

FaddeevField faddeev_field_from_dbar(const DbarSolver& solver, const Grid2D& grid, const std::vector<cplx>& lambdas,
                                     int jobs) {
  FaddeevField f;
  f.lambdas = lambdas;
  f.slices.resize(lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    f.slices[k].lambda = lambdas[k];
    f.slices[k].grid = grid;
    f.slices[k].mu = grid.czeros();
    f.slices[k].converged = true;
  }
  std::vector<int> iterations(grid.n, 0);
  std::vector<double> residual(grid.n, 0.0);
  parallel_for(grid.n, jobs, [&](int j) {
    std::vector<cplx> row;
    for (int i = 0; i < grid.n; ++i) row.push_back(grid.point(i, j));
    const auto sols = solver.solve(row, 1);
    for (int i = 0; i < grid.n; ++i) {
      for (std::size_t k = 0; k < lambdas.size(); ++k) f.slices[k].mu(i, j) = solver.evaluate(sols[i], lambdas[k]);
      iterations[j] = std::max(iterations[j], sols[i].iterations);
      residual[j] = std::max(residual[j], sols[i].residual);
    }
  });
  for (auto& s : f.slices) {
    s.iterations = *std::max_element(iterations.begin(), iterations.end());
    s.residual = *std::max_element(residual.begin(), residual.end());
  }
  return f;
}

RealField resample(const RealField& f, const Grid2D& from, const Grid2D& to) {
  const ComplexField fc = f.cast<cplx>();
  RealField out(to.n, to.n);
  for (int j = 0; j < to.n; ++j)
    for (int i = 0; i < to.n; ++i) out(i, j) = interpolate_cubic(from, fc, to.point(i, j), true)->real();
  return out;
}

nlohmann::json ReconstructionResult::to_json() const {
  nlohmann::json ls = nlohmann::json::array();
  for (cplx l : q.lambdas) ls.push_back({l.real(), l.imag()});
  nlohmann::json j{{"formula", to_string(q.formula)},
                   {"lambdas", ls},
                   {"imaginary_ratio", q.imaginary_ratio},
                   {"coverage", q.coverage},
                   {"extrapolation_spread", q.extrapolation_spread},
                   {"w_min", sigma.w_min}};
  if (q.warning) j["warning"] = *q.warning;
  if (errors) j["errors"] = errors->to_json();
  return j;
}

}  // namespace dbar
