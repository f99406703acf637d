#include "dbar/forward.hpp"

#include <map>
#include <mutex>
#include <random>

namespace dbar {

namespace {

// Trefethen's Chebyshev differentiation matrix on x_j = cos(jπ/N).
void chebyshev(int n, Eigen::VectorXd& x, Eigen::MatrixXd& d) {
  x.resize(n + 1);
  for (int j = 0; j <= n; ++j) x[j] = std::cos(pi * j / n);
  d.setZero(n + 1, n + 1);
  auto c = [n](int j) { return (j == 0 || j == n ? 2.0 : 1.0) * (j % 2 ? -1.0 : 1.0); };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      if (i != j) d(i, j) = c(i) / c(j) / (x[i] - x[j]);
  for (int i = 0; i <= n; ++i) d(i, i) = -d.row(i).sum();
}

// Periodic spectral differentiation on M equispaced points (M even).
void fourier(int m, Eigen::MatrixXd& f1, Eigen::MatrixXd& f2) {
  const double h = 2 * pi / m;
  f1.setZero(m, m);
  f2.setZero(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      if (k == l) {
        f2(k, l) = -pi * pi / (3 * h * h) - 1.0 / 6;
        continue;
      }
      const double s = ((k - l) % 2 == 0) ? 1.0 : -1.0;
      const double a = (k - l) * h / 2;
      f1(k, l) = 0.5 * s / std::tan(a);
      f2(k, l) = -0.5 * s / (std::sin(a) * std::sin(a));
    }
}

// Real trigonometric interpolant of nodal values, evaluated at θ.
struct Trig {
  Eigen::VectorXcd c;  // c[n] for n = 0..M/2 (one-sided, Nyquist halved)
  explicit Trig(const Eigen::VectorXd& v) {
    const int m = int(v.size()), k = m / 2;
    c.setZero(k + 1);
    for (int n = 0; n <= k; ++n) {
      cplx s{};
      for (int j = 0; j < m; ++j) s += v[j] * std::polar(1.0, -2.0 * pi * n * j / m);
      c[n] = s / double(m) * (n == 0 || n == k ? 1.0 : 2.0);
    }
  }
  double operator()(double th) const {
    double s = c[0].real();
    const cplx w = std::polar(1.0, th);
    cplx p = 1.0;
    for (int n = 1; n < c.size(); ++n) {
      p *= w;
      s += (c[n] * p).real();
    }
    return s;
  }
};

std::mutex cache_mutex;
std::map<std::pair<int, int>, Eigen::MatrixXd> laplace_cache;

Eigen::MatrixXd numerical_laplace_dtn(int n, int m) {
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = laplace_cache.find({n, m}); it != laplace_cache.end()) return it->second;
  }
  const auto one = [](cplx) { return Jet{1.0, 0.0, 0.0, 0.0}; };
  Eigen::MatrixXd d = PolarSolver::conductivity(one, {n, m}).dtn();
  std::lock_guard<std::mutex> lock(cache_mutex);
  laplace_cache.emplace(std::pair{n, m}, d);
  return d;
}

std::function<Jet(cplx)> unit_disk_jet(const ConductivityField& s, double radius) {
  return [&s, radius](cplx z) {
    Jet j = s.jet(radius * z);
    j.dx *= radius;
    j.dy *= radius;
    j.laplacian *= radius * radius;
    return j;
  };
}

void require_circle(const geometry::PlaneDomain& d) {
  if (!d.is_circle()) throw InputError("forward solver: only circular domains are supported");
  if (d.grid().center != cplx{}) throw InputError("forward solver: domain must be centred at 0");
}

}  // namespace

PolarSolver::PolarSolver(int n, int m) : n_(n), m_(m) {
  if (n < 5 || n % 2 == 0) throw InputError("PolarSolver: radial degree must be odd and ≥ 5");
  if (m < 8 || m % 2) throw InputError("PolarSolver: angular count must be even and ≥ 8");
  chebyshev(n, x_, d1_);
  d2_ = d1_ * d1_;
  fourier(m, f1_, f2_);
  r_ = x_.segment(1, interior_radii());
}

void PolarSolver::assemble(const std::function<void(int, int, double, double, double&, double&, double&,
                                                    double&)>& coeff) {
  const int n2 = interior_radii(), size = n2 * m_, half = m_ / 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  b_.setZero(size, m_);
  auto idx = [n2](int j, int k) { return (j - 1) + n2 * k; };
  for (int k = 0; k < m_; ++k) {
    const double th = 2 * pi * k / m_;
    for (int j = 1; j <= n2; ++j) {
      const double r = x_[j];
      double c2, c1r, c1t, c0;
      coeff(j, k, r, th, c2, c1r, c1t, c0);
      const int row = idx(j, k);
      for (int l = 0; l <= n_; ++l) {
        const double w = c2 * d2_(j, l) + (c2 / r + c1r) * d1_(j, l);
        if (l == 0) b_(row, k) += w;
        else if (l == n_) b_(row, (k + half) % m_) += w;
        else if (l <= n2) a(row, idx(l, k)) += w;
        else a(row, idx(n_ - l, (k + half) % m_)) += w;
      }
      for (int q = 0; q < m_; ++q) a(row, idx(j, q)) += c2 / (r * r) * f2_(k, q) + c1t * f1_(k, q);
      a(row, row) += c0;
    }
  }
  lu_ = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(a);
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(m_, 0.3, 1.7).array().sin();
  const Eigen::VectorXd rhs = -b_ * g;
  const Eigen::VectorXd u = lu_->solve(rhs);
  residual_ = (a * u - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!(residual_ < 1e-8))
    throw NumericalError("PolarSolver: factorization residual " + std::to_string(residual_), {residual_});
}

PolarSolver PolarSolver::conductivity(const std::function<Jet(cplx)>& sigma, Options opt) {
  PolarSolver s(opt.radial_degree, opt.angular);
  s.assemble([&](int, int, double r, double th, double& c2, double& c1r, double& c1t, double& c0) {
    const Jet j = sigma(std::polar(r, th));
    if (!(j.value > 0.0)) throw InputError("PolarSolver: σ must be positive");
    const double c = std::cos(th), sn = std::sin(th);
    c2 = j.value;
    c1r = j.dx * c + j.dy * sn;
    c1t = (-j.dx * sn + j.dy * c) / r;
    c0 = 0.0;
  });
  return s;
}

PolarSolver PolarSolver::schrodinger(const std::function<double(cplx)>& q, Options opt) {
  PolarSolver s(opt.radial_degree, opt.angular);
  s.assemble([&](int, int, double r, double th, double& c2, double& c1r, double& c1t, double& c0) {
    c2 = 1.0;
    c1r = c1t = 0.0;
    c0 = -q(std::polar(r, th));
  });
  return s;
}

Eigen::MatrixXd PolarSolver::solve(const Eigen::VectorXd& g) const {
  if (g.size() != m_) throw InputError("PolarSolver::solve: boundary data has wrong length");
  const Eigen::VectorXd u = lu_->solve(-b_ * g);
  return Eigen::Map<const Eigen::MatrixXd>(u.data(), interior_radii(), m_);
}

Eigen::VectorXd PolarSolver::normal_derivative(const Eigen::VectorXd& g, const Eigen::MatrixXd& u) const {
  const int n2 = interior_radii(), half = m_ / 2;
  Eigen::VectorXd out(m_);
  for (int k = 0; k < m_; ++k) {
    double s = d1_(0, 0) * g[k] + d1_(0, n_) * g[(k + half) % m_];
    for (int l = 1; l < n_; ++l) s += d1_(0, l) * (l <= n2 ? u(l - 1, k) : u(n_ - l - 1, (k + half) % m_));
    out[k] = s;
  }
  return out;
}

Eigen::MatrixXd PolarSolver::dtn() const {
  const int n2 = interior_radii(), half = m_ / 2;
  const Eigen::MatrixXd x = lu_->solve(-b_);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m_, m_);
  for (int k = 0; k < m_; ++k) {
    out(k, k) += d1_(0, 0);
    out(k, (k + half) % m_) += d1_(0, n_);
    for (int l = 1; l < n_; ++l) {
      const int row = l <= n2 ? (l - 1) + n2 * k : (n_ - l - 1) + n2 * ((k + half) % m_);
      out.row(k) += d1_(0, l) * x.row(row);
    }
  }
  return out;
}

std::function<double(cplx)> PolarSolver::interpolator(const Eigen::VectorXd& g, const Eigen::MatrixXd& u) const {
  std::vector<Trig> rows;
  rows.emplace_back(g);
  for (int l = 1; l <= interior_radii(); ++l) rows.emplace_back(u.row(l - 1).transpose());
  return [rows = std::move(rows), x = x_, n = n_](cplx z) {
    const double r = std::abs(z), th = std::arg(z);
    if (r > 1.0 + 1e-12) throw InputError("PolarSolver: interpolation point outside the disk");
    const int n2 = (n - 1) / 2;
    Eigen::VectorXd f(n + 1);
    for (int l = 0; l <= n2; ++l) {
      f[l] = rows[l](th);
      f[n - l] = rows[l](th + pi);
    }
    double num = 0.0, den = 0.0;
    for (int l = 0; l <= n; ++l) {
      const double diff = r - x[l];
      if (diff == 0.0) return f[l];
      const double w = (l % 2 ? -1.0 : 1.0) * (l == 0 || l == n ? 0.5 : 1.0) / diff;
      num += w * f[l];
      den += w;
    }
    return num / den;
  };
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd trig_resample(int from, int to) {
  if (from % 2 || to % 2) throw InputError("trig_resample: even node counts required");
  const int k = std::min(from, to) / 2;
  Eigen::MatrixXd t(to, from);
  for (int a = 0; a < to; ++a)
    for (int j = 0; j < from; ++j) {
      const double d = 2 * pi * a / to - 2 * pi * j / from;
      double s = 1.0;
      for (int n = 1; n < k; ++n) s += 2 * std::cos(n * d);
      s += std::cos(k * d);
      t(a, j) = s / from;
    }
  return t;
}

Eigen::MatrixXd laplace_dtn(int nb, double radius) {
  const int k = nb / 2;
  Eigen::MatrixXd out(nb, nb);
  for (int a = 0; a < nb; ++a)
    for (int j = 0; j < nb; ++j) {
      const double d = 2 * pi * (a - j) / nb;
      double s = 0.0;
      for (int n = 1; n < k; ++n) s += 2.0 * n * std::cos(n * d);
      s += k * std::cos(k * d);
      out(a, j) = s / (nb * radius);
    }
  return out;
}

Eigen::MatrixXcd phi0_matrix(int nb, double radius) {
  if (nb % 2) throw InputError("phi0_matrix: even node count required");
  const int k = nb / 2;
  Eigen::MatrixXcd out(nb, nb);
  for (int a = 0; a < nb; ++a)
    for (int j = 0; j < nb; ++j) {
      const double d = 2 * pi * (a - j) / nb;
      // multiplier |n| − n on e^{inθ}: only negative frequencies survive; Nyquist carries |n|
      cplx s = k * std::cos(k * d);
      for (int n = 1; n < k; ++n) s += 2.0 * n * std::polar(1.0, -n * d);
      out(a, j) = -0.5 * I * s / double(nb * radius);
    }
  return out;
}

RealField solve_dirichlet(const ConductivityField& sigma, const geometry::PlaneDomain& domain,
                          const Eigen::VectorXd& u, ForwardOptions opt) {
  require_circle(domain);
  const int nb = domain.boundary_size();
  if (u.size() != nb) throw InputError("solve_dirichlet: boundary data length differs from N_b");
  const double radius = domain.radius();
  const int m = opt.angular;
  const PolarSolver solver = PolarSolver::conductivity(unit_disk_jet(sigma, radius), {opt.radial_degree, m});
  const Eigen::VectorXd g = m == nb ? u : Eigen::VectorXd(trig_resample(nb, m) * u);
  const Eigen::MatrixXd v = solver.solve(g);
  const Grid2D& grid = domain.grid();
  const auto interp = solver.interpolator(g, v);
  RealField out = grid.zeros();
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      const cplx z = grid.point(i, j) / radius;
      if (std::abs(z) <= 1.0) out(i, j) = interp(z);
    }
  return out;
}

ComplexField solve_dirichlet(const ConductivityField& sigma, const geometry::PlaneDomain& domain,
                             const Eigen::VectorXcd& u, ForwardOptions opt) {
  const RealField re = solve_dirichlet(sigma, domain, Eigen::VectorXd(u.real()), opt);
  const RealField im = solve_dirichlet(sigma, domain, Eigen::VectorXd(u.imag()), opt);
  return re.cast<cplx>() + I * im.cast<cplx>();
}

DtNData dtn_operators(const ConductivityField& sigma, const geometry::PlaneDomain& domain, ForwardOptions opt) {
  require_circle(domain);
  const int nb = domain.boundary_size();
  if (nb % 2) throw InputError("dtn_operators: N_b must be even");
  const double radius = domain.radius();
  if (sigma.support_radius() >= radius) throw InputError("dtn_operators: σ must be 1 on a boundary collar");
  const int m = opt.angular;

  DtNData d;
  d.nodes = domain.boundary();
  d.radius = radius;
  d.phi0 = phi0_matrix(nb, radius);
  d.lambda_diff = Eigen::MatrixXd::Zero(nb, nb);
  if (!sigma.is_constant()) {
    const Eigen::MatrixXd ls =
        PolarSolver::conductivity(unit_disk_jet(sigma, radius), {opt.radial_degree, m}).dtn();
    Eigen::MatrixXd diff = ls - numerical_laplace_dtn(opt.radial_degree, m);
    if (m != nb) diff = trig_resample(m, nb) * diff * trig_resample(nb, m);
    d.lambda_diff = diff / radius;
  }
  d.phi = d.phi0 - 0.5 * I * d.lambda_diff.cast<cplx>();
  d.metadata = {{"sigma", sigma.name()},
                {"sigma_params", sigma.params()},
                {"boundary_nodes", nb},
                {"radius", radius},
                {"radial_degree", opt.radial_degree},
                {"angular_collocation", m},
                {"basis", "nodal values at t_k = 2πk/N_b"},
                {"trace", "Φψ = −(i/2)(∂_ν + i∂_τ)ψ̃ per unit arclength"}};
  return d;
}

void add_noise(DtNData& dtn, double level, std::uint64_t seed) {
  if (level < 0.0) throw InputError("add_noise: level must be non-negative");
  if (level == 0.0) return;
  const double scale = std::max(dtn.lambda_diff.cwiseAbs().maxCoeff(), 1e-300);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, level * scale);
  for (int j = 0; j < dtn.size(); ++j)
    for (int i = 0; i < dtn.size(); ++i) dtn.lambda_diff(i, j) += normal(rng);
  dtn.phi = dtn.phi0 - 0.5 * I * dtn.lambda_diff.cast<cplx>();
  dtn.metadata["noise"] = {{"level", level}, {"seed", seed}};
}

SingularityProfile singularity_profile(const DtNData& dtn) {
  SingularityProfile p;
  const int nb = dtn.size();
  double h = 0.0;
  for (const auto& n : dtn.nodes) h = std::max(h, n.weight);
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b) {
      const double dist = std::abs(dtn.nodes[a].point - dtn.nodes[b].point);
      if (dist < h * (1 - 1e-9) || dist > 10 * h) continue;
      const double k = std::abs(dtn.phi(a, b) - dtn.phi0(a, b)) / dtn.nodes[b].weight;
      p.max_ratio = std::max(p.max_ratio, k / (1.0 + std::abs(std::log(dist))));
      ++p.pairs;
    }
  return p;
}

}  // namespace dbar
