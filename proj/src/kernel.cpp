#include "dbar/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dbar/special.hpp"

namespace dbar {

cplx faddeev_e(cplx v, cplx lambda) {
  if (v == cplx{}) throw InputError("Faddeev kernel: evaluation at the singular point v = 0");
  if (lambda == cplx{}) return 2.0 / pi * std::log(std::abs(v));
  return -2.0 / pi * special::scaled_re_e1(-lambda * v);
}

cplx eval_g_planar(cplx z, cplx lambda) {
  if (lambda == cplx{}) throw InputError("eval_g_planar: λ = 0 has no decaying kernel; use the log kernel");
  return -0.25 * faddeev_e(z, lambda);
}

cplx self_cell_value(cplx lambda, double h) {
  const double lam = lambda == cplx{} ? 0.0 : euler_gamma + std::log(std::abs(lambda));
  return 2.0 / pi * (lam + std::log(h) + mean_log_unit_square);
}

Convolver PlanarKernel::table(const Grid2D& grid, cplx lambda) {
  const double h = grid.spacing(), a = grid.cell_area();
  const cplx self = self_cell_value(lambda, h) * a;
  return Convolver(grid.n, [&](int dx, int dy) {
    if (dx == 0 && dy == 0) return self;
    return faddeev_e(h * cplx(dx, dy), lambda) * a;
  });
}

namespace {

void edge_diagnostics(const ComplexField& phi, GreenApplication& out) {
  const int n = int(phi.rows());
  const double total = phi.abs().sum();
  if (total == 0.0) return;
  double edge = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (std::min({i, j, n - 1 - i, n - 1 - j}) < 2) edge += std::abs(phi(i, j));
  out.edge_mass_fraction = edge / total;
  if (out.edge_mass_fraction > 1e-6)
    out.warnings.push_back("density touches the grid edge: " + std::to_string(out.edge_mass_fraction) +
                           " of its mass lies in the outer two rings and is truncated beyond them");
}

cplx ring_mean(const ComplexField& u) {
  const int n = int(u.rows());
  cplx s{};
  for (int k = 0; k < n; ++k) s += u(k, 0) + u(k, n - 1) + u(0, k) + u(n - 1, k);
  s -= u(0, 0) + u(n - 1, 0) + u(0, n - 1) + u(n - 1, n - 1);
  return s / double(4 * n - 4);
}

}  // namespace

GreenApplication PlanarKernel::apply(const ComplexField& phi, const Grid2D& grid, cplx lambda) const {
  if (phi.rows() != grid.n || phi.cols() != grid.n) throw InputError("apply_greens: density/grid mismatch");
  GreenApplication out;
  edge_diagnostics(phi, out);
  if ((phi == cplx{}).all()) {
    out.u = grid.czeros();
    return out;
  }
  out.u = table(grid, lambda).apply(phi);
  if (lambda == cplx{}) out.boundary_constant = ring_mean(out.u);
  return out;
}

GreenApplication apply_greens(const ComplexField& phi, const Grid2D& grid, cplx lambda) {
  return PlanarKernel().apply(phi, grid, lambda);
}

TableKernel::TableKernel(cplx lambda, std::vector<cplx> z_nodes, std::vector<cplx> xi_nodes,
                         Eigen::MatrixXcd values, std::string convention)
    : lambda_(lambda),
      z_(std::move(z_nodes)),
      xi_(std::move(xi_nodes)),
      values_(std::move(values)),
      convention_(std::move(convention)) {
  if (values_.rows() != Eigen::Index(z_.size()) || values_.cols() != Eigen::Index(xi_.size()))
    throw InputError("TableKernel: table shape does not match the node lists");
  if (convention_ != "E" && convention_ != "g")
    throw InputError("TableKernel: convention must be 'E' or 'g' (g = −E/4)");
  if (convention_ == "g") {
    values_ *= -4.0;
    convention_ = "E";
  }
}

namespace {

int find_node(const std::vector<cplx>& nodes, cplx p) {
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (std::abs(nodes[k] - p) <= 1e-12 * (1.0 + std::abs(p))) return int(k);
  return -1;
}

}  // namespace

cplx TableKernel::eval(cplx z, cplx xi, cplx lambda) const {
  if (std::abs(lambda - lambda_) > 1e-12 * (1.0 + std::abs(lambda)))
    throw InputError("TableKernel: table was built for a different λ");
  const int a = find_node(z_, z), b = find_node(xi_, xi);
  if (a < 0 || b < 0) throw InputError("TableKernel: point is not a table node");
  return values_(a, b);
}

GreenApplication TableKernel::apply(const ComplexField& phi, const Grid2D& grid, cplx lambda) const {
  if (std::abs(lambda - lambda_) > 1e-12 * (1.0 + std::abs(lambda)))
    throw InputError("TableKernel: table was built for a different λ");
  const std::size_t n2 = std::size_t(grid.n) * grid.n;
  if (z_.size() != n2 || xi_.size() != n2 || phi.rows() != grid.n || phi.cols() != grid.n)
    throw InputError("TableKernel: application needs z and ξ tables on the grid nodes");
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      const std::size_t k = i + std::size_t(grid.n) * j;
      const cplx p = grid.point(i, j);
      if (std::abs(z_[k] - p) > 1e-12 * (1.0 + std::abs(p)) || std::abs(xi_[k] - p) > 1e-12 * (1.0 + std::abs(p)))
        throw InputError("TableKernel: table nodes differ from the grid nodes");
    }
  GreenApplication out;
  edge_diagnostics(phi, out);
  const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(phi.data(), phi.size()) * grid.cell_area();
  const Eigen::VectorXcd u = values_ * v;
  out.u = Eigen::Map<const ComplexField>(u.data(), grid.n, grid.n);
  return out;
}

LambdaGrid LambdaGrid::cartesian(int n, double radius) {
  if (n < 2 || n % 2) throw InputError("LambdaGrid: cartesian grid needs an even node count");
  if (!(radius > 0.0)) throw InputError("LambdaGrid: radius must be positive");
  LambdaGrid g;
  g.kind = Kind::cartesian;
  g.radius = radius;
  g.n = n;
  const double h = 2.0 * radius / n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx l(-radius + (i + 0.5) * h, -radius + (j + 0.5) * h);
      if (std::abs(l) > radius) continue;
      g.nodes.push_back(l);
      g.weights.push_back(h * h);
      g.cells_.emplace_back(i, j);
    }
  g.finish();
  return g;
}

LambdaGrid LambdaGrid::polar(int n, int m, double radius) {
  if (n < 1 || m < 2 || m % 2) throw InputError("LambdaGrid: polar grid needs n ≥ 1 radii and an even angle count");
  if (!(radius > 0.0)) throw InputError("LambdaGrid: radius must be positive");
  LambdaGrid g;
  g.kind = Kind::polar;
  g.radius = radius;
  g.n = n;
  g.angles = m;
  const double dr = radius / n, dt = 2 * pi / m;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < m; ++k) {
      const double r = (i + 0.5) * dr;
      g.nodes.push_back(std::polar(r, (k + 0.5) * dt));
      g.weights.push_back(r * dr * dt);
      g.cells_.emplace_back(i, k);
    }
  g.finish();
  return g;
}

LambdaGrid LambdaGrid::from_nodes(std::vector<cplx> nodes, std::vector<double> weights) {
  if (nodes.empty() || nodes.size() != weights.size()) throw InputError("LambdaGrid: nodes and weights must match");
  LambdaGrid g;
  g.kind = Kind::list;
  for (cplx l : nodes) g.radius = std::max(g.radius, std::abs(l));
  g.nodes = std::move(nodes);
  g.weights = std::move(weights);
  const double tol = 1e-12 * std::max(1.0, g.radius);
  g.conj_.resize(g.size());
  for (int k = 0; k < g.size(); ++k) {
    int match = -1;
    for (int j = 0; j < g.size() && match < 0; ++j)
      if (std::abs(g.nodes[j] - std::conj(g.nodes[k])) <= tol) match = j;
    if (match < 0)
      throw InputError("LambdaGrid: node (" + std::to_string(g.nodes[k].real()) + ", " +
                       std::to_string(g.nodes[k].imag()) + ") has no conjugate in the grid");
    g.conj_[k] = match;
  }
  return g;
}

void LambdaGrid::finish() {
  std::map<std::pair<int, int>, int> index;
  for (int k = 0; k < size(); ++k) index[cells_[k]] = k;
  conj_.resize(size());
  for (int k = 0; k < size(); ++k) {
    const auto [a, b] = cells_[k];
    const auto it = index.find(kind == Kind::cartesian ? std::pair{a, n - 1 - b} : std::pair{a, angles - 1 - b});
    if (it == index.end()) throw NumericalError("LambdaGrid: grid is not closed under conjugation");
    conj_[k] = it->second;
  }
}

}  // namespace dbar
