#include "dbar/geometry.hpp"

#include <cmath>

namespace dbar::geometry {

PlaneDomain PlaneDomain::disk(double radius, int boundary_nodes, int grid_n) {
  if (!(radius > 0.0)) throw InputError("disk: radius must be positive");
  Curve c{[radius](double t) { return radius * std::polar(1.0, t); },
          [radius](double t) { return I * radius * std::polar(1.0, t); }};
  // A few cells of margin so the grid square strictly contains the closed disk.
  PlaneDomain d(std::move(c), boundary_nodes, grid_n, radius * (1.0 + 4.0 / grid_n));
  d.radius_ = radius;
  return d;
}

PlaneDomain::PlaneDomain(Curve curve, int boundary_nodes, int grid_n, double grid_half_width)
    : curve_(std::move(curve)), grid_(grid_n, grid_half_width) {
  if (boundary_nodes < 8) throw InputError("PlaneDomain: need at least 8 boundary nodes");
  if (!curve_.point || !curve_.derivative) throw InputError("PlaneDomain: empty parameterization");
  const double dt = 2.0 * pi / boundary_nodes;
  nodes_.reserve(boundary_nodes);
  for (int k = 0; k < boundary_nodes; ++k) {
    const double t = k * dt;
    const cplx d = curve_.derivative(t);
    const double speed = std::abs(d);
    if (!(speed > 0.0)) throw InputError("PlaneDomain: degenerate parameterization");
    nodes_.push_back({t, curve_.point(t), -I * d / speed, speed * dt});
  }
  for (const auto& n : nodes_)
    if (std::abs(n.point.real() - grid_.center.real()) >= grid_.half_width ||
        std::abs(n.point.imag() - grid_.center.imag()) >= grid_.half_width)
      throw InputError("PlaneDomain: interior grid does not contain the boundary");
}

double PlaneDomain::boundary_length() const {
  double s = 0.0;
  for (const auto& n : nodes_) s += n.weight;
  return s;
}

double PlaneDomain::radius() const {
  if (!radius_) throw InputError("PlaneDomain: not a circle");
  return *radius_;
}

bool PlaneDomain::contains(cplx z) const {
  if (radius_) return std::abs(z) < *radius_;
  // winding number of the boundary polygon
  double w = 0.0;
  const std::size_t n = nodes_.size();
  for (std::size_t k = 0; k < n; ++k)
    w += std::arg((nodes_[(k + 1) % n].point - z) / (nodes_[k].point - z));
  return std::abs(w) > pi;
}

RealField PlaneDomain::interior_mask() const {
  return grid_.sample([this](cplx z) { return contains(z) ? 1.0 : 0.0; });
}

PlaneDomain PlaneDomain::with_resolution(int boundary_nodes, int grid_n) const {
  if (radius_) return disk(*radius_, boundary_nodes, grid_n);
  return PlaneDomain(curve_, boundary_nodes, grid_n, grid_.half_width);
}

}  // namespace dbar::geometry
