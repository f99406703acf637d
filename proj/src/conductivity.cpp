#include "dbar/conductivity.hpp"

#include <cmath>

namespace dbar {

Jet differentiate(const std::function<double(cplx)>& f, cplx z, double h) {
  // sixth-order central stencils
  static constexpr double w1[4] = {0.0, 45.0, -9.0, 1.0};
  static constexpr double w2[4] = {-490.0, 270.0, -27.0, 2.0};
  const double c = f(z);
  Jet j;
  j.value = c;
  double lap = 2 * w2[0] * c;
  for (int k = 1; k <= 3; ++k) {
    const double xp = f(z + double(k) * h), xm = f(z - double(k) * h);
    const double yp = f(z + double(k) * h * I), ym = f(z - double(k) * h * I);
    j.dx += w1[k] * (xp - xm);
    j.dy += w1[k] * (yp - ym);
    lap += w2[k] * (xp + xm + yp + ym);
  }
  j.dx /= 60 * h;
  j.dy /= 60 * h;
  j.laplacian = lap / (180 * h * h);
  return j;
}

ConductivityField::ConductivityField(std::string name, std::function<double(cplx)> sigma,
                                     double support_radius, int smoothness, nlohmann::json params)
    : name_(std::move(name)),
      sigma_(std::move(sigma)),
      support_radius_(support_radius),
      smoothness_(smoothness),
      params_(std::move(params)) {
  if (!sigma_) throw InputError("ConductivityField: empty evaluator");
  if (smoothness_ < 2) throw InputError("ConductivityField: need at least C² regularity");
}

namespace {
constexpr double kStep = 2e-3;
}

Jet ConductivityField::jet(cplx z) const {
  if (std::abs(z) >= support_radius_ + 4 * kStep) return {1.0, 0.0, 0.0, 0.0};
  return differentiate(sigma_, z, kStep);
}

Jet ConductivityField::sqrt_jet(cplx z) const {
  if (std::abs(z) >= support_radius_ + 4 * kStep) return {1.0, 0.0, 0.0, 0.0};
  return differentiate([this](cplx w) { return std::sqrt(sigma_(w)); }, z, kStep);
}

Jet ConductivityField::log_sqrt_jet(cplx z) const {
  if (std::abs(z) >= support_radius_ + 4 * kStep) return {0.0, 0.0, 0.0, 0.0};
  return differentiate([this](cplx w) { return 0.5 * std::log(sigma_(w)); }, z, kStep);
}

double ConductivityField::sampled_minimum(double radius, int n) const {
  double m = INFINITY;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx z(radius * (2.0 * i / (n - 1) - 1.0), radius * (2.0 * j / (n - 1) - 1.0));
      if (std::abs(z) <= radius) m = std::min(m, sigma_(z));
    }
  return m;
}

double smooth_cutoff(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double s = (r - inner) / (outer - inner);
  const double a = psi(1.0 - s), b = psi(s);
  return a / (a + b);
}

namespace {

struct Bump {
  double amp, width;
  cplx center;
};

Bump read_bump(const nlohmann::json& p) {
  Bump b{p.value("amp", 0.5), p.value("width", 0.3), {}};
  if (p.contains("center")) {
    const auto& c = p.at("center");
    if (c.is_array() && c.size() == 2)
      b.center = {c[0].get<double>(), c[1].get<double>()};
    else if (c.is_number())
      b.center = c.get<double>();
    else
      throw InputError("phantom: center must be a number or [x, y]");
  }
  if (!(b.width > 0.0)) throw InputError("phantom: width must be positive");
  return b;
}

}  // namespace

ConductivityField make_phantom(const std::string& name, const nlohmann::json& params_in, double domain_radius) {
  const nlohmann::json params = params_in.is_null() ? nlohmann::json::object() : params_in;
  if (!params.is_object()) throw InputError("make_phantom: parameters must be an object");
  if (!(domain_radius > 0.0)) throw InputError("make_phantom: domain radius must be positive");
  const double inner = 0.55 * domain_radius, outer = 0.95 * domain_radius;
  std::function<double(cplx)> sigma;

  if (name == "constant") {
    return ConductivityField("constant", [](cplx) { return 1.0; }, 0.0, 3, params);
  } else if (name == "gaussian") {
    const Bump b = read_bump(params);
    sigma = [=](cplx z) {
      return 1.0 + b.amp * std::exp(-std::norm(z - b.center) / (b.width * b.width)) *
                       smooth_cutoff(std::abs(z), inner, outer);
    };
  } else if (name == "two_bump") {
    std::vector<Bump> bs;
    if (params.contains("bumps")) {
      for (const auto& p : params.at("bumps")) bs.push_back(read_bump(p));
    } else {
      bs = {{0.5, 0.2, cplx(-0.25, 0.0)}, {-0.3, 0.2, cplx(0.25, 0.1)}};
    }
    sigma = [=](cplx z) {
      double s = 0.0;
      for (const auto& b : bs) s += b.amp * std::exp(-std::norm(z - b.center) / (b.width * b.width));
      return 1.0 + s * smooth_cutoff(std::abs(z), inner, outer);
    };
  } else if (name == "annulus") {
    const double amp = params.value("amp", 0.4), rad = params.value("radius", 0.35),
                 width = params.value("width", 0.12);
    if (!(width > 0.0)) throw InputError("phantom: width must be positive");
    sigma = [=](cplx z) {
      const double r = std::abs(z);
      return 1.0 + amp * std::exp(-(r - rad) * (r - rad) / (width * width)) * smooth_cutoff(r, inner, outer);
    };
  } else {
    throw InputError("make_phantom: unknown preset '" + name + "'");
  }

  ConductivityField f(name, sigma, outer, 3, params);
  const double m = f.sampled_minimum(domain_radius);
  if (!(m > 0.0))
    throw InputError("make_phantom: parameters make σ non-positive (sampled minimum " + std::to_string(m) + ")");
  return f;
}

ConductivitySamples sample(const ConductivityField& s, const Grid2D& grid) {
  ConductivitySamples out{grid, grid.zeros(), grid.zeros(), grid.zeros(), grid.zeros(),
                          grid.zeros(), grid.zeros(), grid.zeros(), grid.zeros()};
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      const cplx z = grid.point(i, j);
      const Jet r = s.sqrt_jet(z), l = s.log_sqrt_jet(z);
      out.sigma(i, j) = s(z);
      out.sqrt_sigma(i, j) = std::sqrt(out.sigma(i, j));
      out.log_sqrt(i, j) = 0.5 * std::log(out.sigma(i, j));
      out.sqrt_dx(i, j) = r.dx;
      out.sqrt_dy(i, j) = r.dy;
      out.sqrt_laplacian(i, j) = r.laplacian;
      out.log_sqrt_dx(i, j) = l.dx;
      out.log_sqrt_dy(i, j) = l.dy;
    }
  return out;
}

PotentialField potential_q(const ConductivityField& s, const Grid2D& grid) {
  PotentialField p{grid, grid.zeros(), grid.zeros()};
  if (s.is_constant()) return p;
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      const cplx z = grid.point(i, j);
      if (std::abs(z) >= s.support_radius()) continue;
      const Jet r = s.sqrt_jet(z);
      p.q(i, j) = r.laplacian / r.value;
      p.support(i, j) = 1.0;
    }
  return p;
}

FirstOrderReduction first_order_reduction(const ComplexField& f, const ConductivityField& s, cplx lambda,
                                          const Grid2D& grid) {
  if (f.rows() != grid.n || f.cols() != grid.n) throw InputError("first_order_reduction: shape mismatch");
  const auto cs = sample(s, grid);
  const double h = grid.spacing();
  FirstOrderReduction r;
  r.lambda = lambda;
  r.grid = grid;
  const ComplexField sq = cs.sqrt_sigma.cast<cplx>();
  r.f1 = sq * fd::dz(f, h);
  r.f2 = sq * fd::dzbar(f, h);
  const ComplexField z = grid.sample([](cplx w) { return w; });
  const ComplexField e = (-lambda * z).exp();
  r.phase = (-lambda * z + std::conj(lambda) * z.conjugate()).exp();
  r.m1 = e * r.f1;
  r.m2 = e * r.f2;
  r.u_plus = r.m1 + r.phase * r.m2.conjugate();
  r.u_minus = r.m1 - r.phase * r.m2.conjugate();
  r.q1 = -0.5 * (cs.log_sqrt_dx.cast<cplx>() - I * cs.log_sqrt_dy.cast<cplx>());
  return r;
}

namespace {

template <class F>
double masked_max(const Grid2D& g, double radius, int margin, F&& value) {
  double m = 0.0;
  for (int j = margin; j < g.n - margin; ++j)
    for (int i = margin; i < g.n - margin; ++i)
      if (std::abs(g.point(i, j)) < radius) m = std::max(m, std::abs(value(i, j)));
  return m;
}

}  // namespace

double FirstOrderReduction::residual_f(double radius, int margin) const {
  const double h = grid.spacing();
  const ComplexField a = fd::dzbar(f1, h) - q1 * f2;
  const ComplexField b = fd::dz(f2, h) - q1.conjugate() * f1;
  return masked_max(grid, radius, margin, [&](int i, int j) { return a(i, j); }) +
         masked_max(grid, radius, margin, [&](int i, int j) { return b(i, j); });
}

double FirstOrderReduction::residual_m(double radius, int margin) const {
  const double h = grid.spacing();
  const ComplexField a = fd::dzbar(m1, h) - q1 * m2;
  const ComplexField b = fd::dz(m2, h) + lambda * m2 - q1.conjugate() * m1;
  return masked_max(grid, radius, margin, [&](int i, int j) { return a(i, j); }) +
         masked_max(grid, radius, margin, [&](int i, int j) { return b(i, j); });
}

double FirstOrderReduction::residual_u(double radius, int margin) const {
  const double h = grid.spacing();
  const ComplexField a = fd::dzbar(u_plus, h) - q1 * phase * u_plus.conjugate();
  const ComplexField b = fd::dzbar(u_minus, h) + q1 * phase * u_minus.conjugate();
  return masked_max(grid, radius, margin, [&](int i, int j) { return a(i, j); }) +
         masked_max(grid, radius, margin, [&](int i, int j) { return b(i, j); });
}

}  // namespace dbar
