#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include "dbar/constants.hpp"
#include "dbar/error.hpp"

namespace dbar {

using RealField = Eigen::ArrayXXd;
using ComplexField = Eigen::ArrayXXcd;

/// Uniform cell-centred N×N grid on the square |x − cx|, |y − cy| ≤ half_width.
/// Node (i, j) sits at x = cx − half_width + (i + 1/2)h, y likewise with j.
struct Grid2D {
  int n = 0;
  double half_width = 1.0;
  cplx center{0.0, 0.0};

  Grid2D() = default;
  Grid2D(int n_, double half_width_, cplx center_ = {})
      : n(n_), half_width(half_width_), center(center_) {
    if (n_ < 4) throw InputError("Grid2D: need at least 4 nodes per side");
    if (!(half_width_ > 0.0)) throw InputError("Grid2D: half width must be positive");
  }

  double spacing() const { return 2.0 * half_width / n; }
  double cell_area() const { return spacing() * spacing(); }
  double coord(int i) const { return -half_width + (i + 0.5) * spacing(); }
  cplx point(int i, int j) const { return center + cplx(coord(i), coord(j)); }

  RealField zeros() const { return RealField::Zero(n, n); }
  ComplexField czeros() const { return ComplexField::Zero(n, n); }

  template <class F>
  auto sample(F&& f) const {
    using T = decltype(f(cplx{}));
    Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) out(i, j) = f(point(i, j));
    return out;
  }

  bool operator==(const Grid2D&) const = default;
};

namespace fd {

// Centred second-order differences; one-sided second-order stencils on the edges.

template <class Arr>
Arr dx(const Arr& f, double h) {
  const Eigen::Index n = f.rows();
  Arr out(f.rows(), f.cols());
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    for (Eigen::Index i = 1; i + 1 < n; ++i) out(i, j) = (f(i + 1, j) - f(i - 1, j)) / (2 * h);
    out(0, j) = (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2 * h);
    out(n - 1, j) = (3.0 * f(n - 1, j) - 4.0 * f(n - 2, j) + f(n - 3, j)) / (2 * h);
  }
  return out;
}

template <class Arr>
Arr dy(const Arr& f, double h) {
  Arr t = f.transpose();
  return Arr(dx(t, h).transpose());
}

inline ComplexField dz(const ComplexField& f, double h) {
  return 0.5 * (dx(f, h) - I * dy(f, h));
}

inline ComplexField dzbar(const ComplexField& f, double h) {
  return 0.5 * (dx(f, h) + I * dy(f, h));
}

/// Five-point Laplacian; edge rows/columns are copied from their inner neighbours.
template <class Arr>
Arr laplacian(const Arr& f, double h) {
  const Eigen::Index n = f.rows(), m = f.cols();
  Arr out = Arr::Zero(n, m);
  for (Eigen::Index j = 1; j + 1 < m; ++j)
    for (Eigen::Index i = 1; i + 1 < n; ++i)
      out(i, j) = (f(i + 1, j) + f(i - 1, j) + f(i, j + 1) + f(i, j - 1) - 4.0 * f(i, j)) / (h * h);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, 0) = out(i, 1);
    out(i, m - 1) = out(i, m - 2);
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    out(0, j) = out(1, j);
    out(n - 1, j) = out(n - 2, j);
  }
  return out;
}

}  // namespace fd

/// Cubic tensor Lagrange interpolation of nodal values; nullopt unless a full 4×4 stencil fits.
/// With `clamp` the stencil is shifted inwards near the edge (mild extrapolation) and never fails.
inline std::optional<cplx> interpolate_cubic(const Grid2D& g, const ComplexField& f, cplx z, bool clamp = false) {
  const double h = g.spacing();
  const double x = (z - g.center).real() + g.half_width - 0.5 * h, y = (z - g.center).imag() + g.half_width - 0.5 * h;
  int i0 = int(std::floor(x / h)) - 1, j0 = int(std::floor(y / h)) - 1;
  if (clamp) {
    i0 = std::clamp(i0, 0, g.n - 4);
    j0 = std::clamp(j0, 0, g.n - 4);
  }
  if (i0 < 0 || j0 < 0 || i0 + 3 >= g.n || j0 + 3 >= g.n) return std::nullopt;
  auto weights = [](double t, std::array<double, 4>& w) {
    for (int a = 0; a < 4; ++a) {
      w[a] = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) w[a] *= (t - b) / double(a - b);
    }
  };
  std::array<double, 4> wx, wy;
  weights(x / h - i0, wx);
  weights(y / h - j0, wy);
  cplx v{};
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) v += wx[a] * wy[b] * f(i0 + a, j0 + b);
  return v;
}

}  // namespace dbar
