#include "dbar/boundary.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "dbar/special.hpp"

namespace dbar {

cplx faddeev_g_conjugated(cplx v, cplx lambda) {
  if (v == cplx{}) throw InputError("G_λ: evaluation at the singular point");
  return 2.0 / pi * special::re_ei(lambda * v);
}

cplx faddeev_g_smooth(cplx v, cplx lambda) {
  if (lambda == cplx{}) throw InputError("G_λ: λ = 0");
  const double base = euler_gamma + std::log(std::abs(lambda));
  if (v == cplx{}) return 2.0 / pi * base;
  if (std::abs(lambda * v) < 2.0) return 2.0 / pi * (base + special::re_ein(lambda * v));
  return 2.0 / pi * (special::re_ei(lambda * v) - std::log(std::abs(v)));
}

Eigen::MatrixXd kress_log_weights(int n) {
  if (n < 4 || n % 2) throw InputError("kress_log_weights: need an even node count ≥ 4");
  const int h = n / 2;
  Eigen::VectorXd row(n);
  for (int d = 0; d < n; ++d) {
    const double t = 2 * pi * d / n;
    double s = 0.0;
    for (int m = 1; m < h; ++m) s += std::cos(m * t) / m;
    row[d] = -2 * pi / h * s - pi / (double(h) * h) * std::cos(h * t);
  }
  Eigen::MatrixXd r(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) r(k, j) = row[((k - j) % n + n) % n];
  return r;
}

namespace {

double speed(const geometry::BoundaryNode& b, int n) { return b.weight * n / (2 * pi); }

// Single-layer matrix A with (Au)_k ≈ ∮ G_λ(z_k − ξ) u(ξ) ds(ξ); `smooth(k, j)` is the regular part
// G_λ − (2/π) ln|z_k − ξ_j| (its limit on the diagonal).
template <class Smooth>
Eigen::MatrixXcd single_layer(const std::vector<geometry::BoundaryNode>& nodes, Smooth&& smooth) {
  const int n = int(nodes.size());
  const Eigen::MatrixXd r = kress_log_weights(n);
  Eigen::MatrixXcd a(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double l2;
      if (k == j) {
        l2 = std::log(speed(nodes[k], n));
      } else {
        const double half = std::abs(std::sin(0.5 * (nodes[k].param - nodes[j].param)));
        l2 = std::log(std::abs(nodes[k].point - nodes[j].point) / (2 * half));
      }
      a(k, j) = 1.0 / pi * r(k, j) * speed(nodes[j], n) + (2.0 / pi * l2 + smooth(k, j)) * nodes[j].weight;
    }
  return a;
}

Eigen::MatrixXcd operator_from_layer(const DtNData& dtn, const Eigen::MatrixXcd& a) {
  return boundary_prefactor * a * (dtn.phi - dtn.phi0);
}

Eigen::VectorXcd plane_wave(const std::vector<geometry::BoundaryNode>& nodes, cplx lambda) {
  Eigen::VectorXcd e(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) e[k] = std::exp(lambda * nodes[k].point);
  return e;
}

double upper_mode_share(const Eigen::VectorXcd& v) {
  const int n = int(v.size());
  double hi = 0.0, total = 0.0;
  for (int m = -n / 2; m < n / 2; ++m) {
    cplx c{};
    for (int k = 0; k < n; ++k) c += v[k] * std::polar(1.0, -2 * pi * m * k / n);
    const double e = std::norm(c);
    total += e;
    if (std::abs(m) > 3 * n / 8) hi += e;
  }
  return total > 0 ? hi / total : 0.0;
}

}  // namespace

Eigen::MatrixXcd boundary_operator(const DtNData& dtn, cplx lambda) {
  if (lambda == cplx{}) throw InputError("solve_psi_boundary: λ = 0");
  const auto& nodes = dtn.nodes;
  const auto a = single_layer(nodes, [&](int k, int j) { return faddeev_g_smooth(nodes[k].point - nodes[j].point, lambda); });
  return operator_from_layer(dtn, a);
}

BoundarySystem::BoundarySystem(const DtNData& dtn, const Eigen::MatrixXcd& k, cplx lambda,
                               const BoundarySolveOptions& opt) {
  const int n = dtn.size();
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) - k;
  const Eigen::VectorXcd e = plane_wave(dtn.nodes, lambda);
  lu_.compute(m);
  BoundaryTrace& t = trace_;
  t.lambda = lambda;
  t.nodes = dtn.nodes;
  t.condition = 1.0 / lu_.rcond();
  if (!(t.condition <= opt.max_condition))
    throw NumericalError("solve_psi_boundary: Nyström matrix is ill-conditioned (estimate " +
                         std::to_string(t.condition) + ") at |λ| = " + std::to_string(std::abs(lambda)));
  t.psi = lu_.solve(e);
  t.residual = (m * t.psi - e).norm() / e.norm();
  if (!(t.residual < 1e-8))
    throw NumericalError("solve_psi_boundary: solve failed, residual " + std::to_string(t.residual), {t.residual});
  t.psi.cwiseAbs().maxCoeff(&t.z_star);
  t.coefficient_tail = upper_mode_share(t.psi);
}

BoundaryTrace solve_psi_boundary(const DtNData& dtn, cplx lambda, const BoundarySolveOptions& opt) {
  return BoundarySystem(dtn, boundary_operator(dtn, lambda), lambda, opt).trace();
}

BoundaryTrace solve_psi_boundary(const DtNData& dtn, const GreenKernel& kernel, cplx lambda,
                                 const BoundarySolveOptions& opt) {
  if (kernel.kind() == GreenKernel::Kind::planar) return solve_psi_boundary(dtn, lambda, opt);
  if (lambda == cplx{}) throw InputError("solve_psi_boundary: λ = 0");
  const auto& nodes = dtn.nodes;
  const auto a = single_layer(nodes, [&](int k, int j) -> cplx {
    const cplx e = kernel.eval(nodes[k].point, nodes[j].point, lambda);
    if (k == j) return e;
    const cplx v = nodes[k].point - nodes[j].point;
    return std::exp(lambda * v) * e - 2.0 / pi * std::log(std::abs(v));
  });
  return BoundarySystem(dtn, operator_from_layer(dtn, a), lambda, opt).trace();
}

nlohmann::json BoundaryTrace::metadata() const {
  return {{"lambda", {lambda.real(), lambda.imag()}},
          {"nodes", size()},
          {"condition", condition},
          {"residual", residual},
          {"z_star", {{"index", z_star}, {"point", {nodes[z_star].point.real(), nodes[z_star].point.imag()}}}},
          {"coefficient_tail", coefficient_tail}};
}

namespace {

// Gauss–Legendre nodes and weights on [0, 1] (Golub–Welsch).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre01(int m) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) j(k, k - 1) = j(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  const Eigen::VectorXd x = (es.eigenvalues().array() + 1.0) / 2.0;
  const Eigen::VectorXd w = es.eigenvectors().row(0).array().square();  // sums to 1 on [0, 1]
  return {x, w};
}

}  // namespace

GreenRiemann green_riemann_residual(const TestField& f, const TestField& g, const geometry::PlaneDomain& domain) {
  const auto& nodes = domain.boundary();
  const int n = int(nodes.size());
  const auto& curve = domain.curve();
  cplx c{};
  for (const auto& b : nodes) c += b.point;
  c /= double(n);
  const auto [s, ws] = gauss_legendre01(std::max(4, n / 2));
  GreenRiemann out{};
  const double dt = 2 * pi / n;
  for (const auto& b : nodes) {
    const cplx z = curve.point(b.param), dz = curve.derivative(b.param);
    const double jac = (std::conj(z - c) * dz).imag();
    if (!(jac > 0)) throw InputError("green_riemann_residual: domain is not star-shaped about its centroid");
    for (int a = 0; a < s.size(); ++a) {
      const cplx p = c + s[a] * (z - c);
      const cplx density = g.value(p) * f.dzdzbar(p) - f.value(p) * g.dzdzbar(p);
      out.area_side += density * (s[a] * jac * ws[a] * dt);
    }
    out.boundary_side += (g.value(z) * f.dzbar(z) * std::conj(dz) + f.value(z) * g.dz(z) * dz) * dt;
  }
  out.area_side *= cplx(0, -2);  // dz∧dz̄ = −2i dA
  return out;
}

LayerValues layer_potentials(const std::vector<geometry::BoundaryNode>& nodes, const Eigen::VectorXcd& psi,
                             const Eigen::VectorXcd& dbar_psi, cplx lambda, cplx z) {
  LayerValues v{};
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const cplx d = z - nodes[j].point;
    const cplx tangent = I * nodes[j].normal;
    v.single += faddeev_g_conjugated(d, lambda) * dbar_psi[j] * nodes[j].weight;
    // ∂_ξ G_λ(z − ξ) = −e^{λ(z−ξ)}/(π(z − ξ))
    v.cauchy += psi[j] * (-std::exp(lambda * d) / (pi * d)) * tangent * nodes[j].weight;
  }
  v.single *= boundary_prefactor;
  v.cauchy *= boundary_prefactor;
  return v;
}

namespace {

double winding(const std::vector<geometry::BoundaryNode>& nodes, cplx z) {
  double w = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    w += std::arg((nodes[(j + 1) % nodes.size()].point - z) / (nodes[j].point - z));
  return w / (2 * pi);
}

}  // namespace

ExteriorValue exterior_extend(const BoundaryTrace& trace, const DtNData& dtn, cplx z) {
  if (dtn.size() != trace.size()) throw InputError("exterior_extend: trace and DtN data have different nodes");
  const auto& nodes = trace.nodes;
  double dmin = INFINITY, spacing = 0.0;
  for (const auto& b : nodes) {
    dmin = std::min(dmin, std::abs(z - b.point));
    spacing += b.weight;
  }
  spacing /= double(nodes.size());
  if (dmin == 0.0 || std::abs(winding(nodes, z)) > 0.5)
    throw InputError("exterior_extend: point is not outside the closed domain");
  ExteriorValue out;
  if (dmin < 2 * spacing)
    out.warning = "point lies within two node spacings of the boundary; trapezoid rule is near-singular";
  const Eigen::VectorXcd dbar = dtn.phi * trace.psi;
  const LayerValues l = layer_potentials(nodes, trace.psi, dbar, trace.lambda, z);
  out.psi = std::exp(trace.lambda * z) + l.single + l.cauchy;
  return out;
}

}  // namespace dbar
