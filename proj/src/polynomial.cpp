#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "dbar/geometry.hpp"

namespace dbar::geometry {

Polynomial::Polynomial(std::map<Monomial, cplx> terms) {
  for (const auto& [m, c] : terms) {
    if (m.first < 0 || m.second < 0) throw InputError("Polynomial: negative exponent");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw InputError("Polynomial: non-finite coefficient");
    if (c != cplx{}) terms_.emplace(m, c);
  }
}

Polynomial Polynomial::parse(const std::string& text) {
  std::map<Monomial, cplx> terms;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto p = line.find('#'); p != std::string::npos) line.resize(p);
    std::istringstream ls(line);
    int i, j;
    double re, im;
    if (!(ls >> i)) continue;
    if (!(ls >> j >> re >> im))
      throw InputError("curve file line " + std::to_string(lineno) + ": expected 'i j re im'");
    std::string rest;
    if (ls >> rest) throw InputError("curve file line " + std::to_string(lineno) + ": trailing text");
    terms[{i, j}] += cplx(re, im);
  }
  return Polynomial(std::move(terms));
}

std::string Polynomial::to_string() const {
  std::string out;
  char buf[128];
  for (const auto& [m, c] : terms_) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", m.first, m.second, c.real(), c.imag());
    out += buf;
  }
  return out;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.first + m.second);
  return d;
}

int Polynomial::degree_in_z1() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.first);
  return d;
}

int Polynomial::degree_in_z2() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.second);
  return d;
}

cplx Polynomial::operator()(cplx z1, cplx z2) const {
  // Horner in z2 over z1-Horner coefficients.
  const auto a = coefficients_in_z2(z1);
  return horner(a, z2);
}

Polynomial Polynomial::d_z1() const {
  std::map<Monomial, cplx> t;
  for (const auto& [m, c] : terms_)
    if (m.first > 0) t[{m.first - 1, m.second}] += double(m.first) * c;
  return Polynomial(std::move(t));
}

Polynomial Polynomial::d_z2() const {
  std::map<Monomial, cplx> t;
  for (const auto& [m, c] : terms_)
    if (m.second > 0) t[{m.first, m.second - 1}] += double(m.second) * c;
  return Polynomial(std::move(t));
}

std::vector<cplx> Polynomial::coefficients_in_z2(cplx z1) const {
  const int m = degree_in_z2(), n1 = degree_in_z1();
  std::vector<std::vector<cplx>> rows(m + 1, std::vector<cplx>(n1 + 1));
  for (const auto& [mono, c] : terms_) rows[mono.second][mono.first] = c;
  std::vector<cplx> a(m + 1);
  for (int j = 0; j <= m; ++j) a[j] = horner(rows[j], z1);
  return a;
}

std::vector<cplx> Polynomial::top_form_in_slope() const {
  const int d = total_degree();
  std::vector<cplx> t(d + 1);
  for (const auto& [m, c] : terms_)
    if (m.first + m.second == d) t[m.second] = c;
  return t;
}

std::map<std::array<int, 3>, cplx> Polynomial::homogenize() const {
  const int d = total_degree();
  std::map<std::array<int, 3>, cplx> h;
  for (const auto& [m, c] : terms_) h[{d - m.first - m.second, m.first, m.second}] = c;
  return h;
}

Polynomial Polynomial::dehomogenize(const std::map<std::array<int, 3>, cplx>& h) {
  std::map<Monomial, cplx> t;
  for (const auto& [a, c] : h) t[{a[1], a[2]}] += c;
  return Polynomial(std::move(t));
}

cplx horner(std::span<const cplx> coeffs, cplx x) {
  cplx s{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * x + *it;
  return s;
}

std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs) {
  std::size_t n = coeffs.size();
  double cmax = 0.0;
  for (auto c : coeffs) cmax = std::max(cmax, std::abs(c));
  while (n > 0 && std::abs(coeffs[n - 1]) <= 1e-14 * cmax) --n;
  if (n <= 1) return {};
  const int deg = int(n) - 1;
  const cplx lead = coeffs[deg];
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int k = 0; k < deg; ++k) comp(0, k) = -coeffs[deg - 1 - k] / lead;
  for (int k = 1; k < deg; ++k) comp(k, k - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw NumericalError("polynomial_roots: eigenvalue solver failed");
  std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + deg);

  std::vector<cplx> dcoef(deg);
  for (int k = 1; k <= deg; ++k) dcoef[k - 1] = double(k) * coeffs[k];
  const std::span<const cplx> p(coeffs.data(), n);
  for (int k = 0; k < deg; ++k) {
    double gap = 1e300;
    for (int l = 0; l < deg; ++l)
      if (l != k) gap = std::min(gap, std::abs(r[l] - r[k]));
    for (int it = 0; it < 8; ++it) {
      const cplx f = horner(p, r[k]), df = horner(dcoef, r[k]);
      if (df == cplx{}) break;
      const cplx step = f / df;
      const cplx x = r[k] - step;
      if (!(std::abs(step) < 0.1 * gap) || !(std::abs(horner(p, x)) < std::abs(f))) break;
      r[k] = x;
    }
  }
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return r;
}

}  // namespace dbar::geometry
