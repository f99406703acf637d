#include "dbar/special.hpp"

#include <cmath>
#include <limits>

#include "dbar/error.hpp"

namespace dbar::special {
namespace {

constexpr double series_radius = 2.0;
constexpr double asymptotic_radius = 40.0;

// Σ_{n≥1} x^n/(n·n!)
cplx ein_series(cplx x) {
  cplx term = x;  // x^n / n!
  cplx sum = x;
  for (int n = 2; n < 400; ++n) {
    term *= x / double(n);
    const cplx add = term / double(n);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// E1 for small |w| from its convergent series.
cplx e1_series(cplx w) {
  return -euler_gamma - std::log(w) - ein_series(-w);
}

bool continued_fraction_ok(cplx w) {
  return w.real() >= 0.0 || std::abs(w.imag()) >= 0.5 * std::abs(w.real());
}

// e^{w} E1(w) by the modified Lentz continued fraction.
cplx scaled_e1_cf(cplx w) {
  constexpr double tiny = 1e-300;
  cplx b = w + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 20000; ++i) {
    const double an = -double(i) * double(i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw NumericalError("exponential integral: continued fraction did not converge");
}

// e^{-y} Ei(y) minus its Stokes term, for large |y| with Re y > 0.
cplx scaled_ei_asymptotic(cplx y) {
  cplx sum = 1.0, term = 1.0;
  double best = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= double(k) / y;
    const double mag = std::abs(term);
    if (mag > best) break;
    best = mag;
    sum += term;
    if (mag < 1e-17) break;
  }
  return sum / y;
}

double re_ei_series(cplx y) {
  return euler_gamma + std::log(std::abs(y)) + ein_series(y).real();
}

}  // namespace

cplx e1(cplx w) {
  if (w == cplx{}) throw InputError("E1 is singular at 0");
  const double r = std::abs(w);
  if (r <= series_radius) return e1_series(w);
  if (continued_fraction_ok(w)) return std::exp(-w) * scaled_e1_cf(w);
  // Near the negative real axis: E1(w) = −Ei(−w) − iπ sign(Im w), the upper side
  // taken on the cut itself.
  const cplx y = -w;
  const double branch = (w.imag() >= 0.0 ? 1.0 : -1.0);
  if (r <= asymptotic_radius)
    return -(euler_gamma + std::log(y) + ein_series(y)) - I * pi * branch;
  return -std::exp(y) * scaled_ei_asymptotic(y) - I * pi * branch;
}

double re_e1(cplx w) {
  if (w == cplx{}) throw InputError("E1 is singular at 0");
  const double r = std::abs(w);
  if (r <= series_radius) return e1_series(w).real();
  if (continued_fraction_ok(w)) return (std::exp(-w) * scaled_e1_cf(w)).real();
  const cplx y = -w;
  if (r <= asymptotic_radius) return -re_ei_series(y);
  return -(std::exp(y) * scaled_ei_asymptotic(y)).real();
}

cplx scaled_re_e1(cplx w) {
  if (w == cplx{}) throw InputError("E1 is singular at 0");
  const double r = std::abs(w);
  if (r <= series_radius) return std::exp(w) * e1_series(w).real();
  if (continued_fraction_ok(w)) {
    const cplx s = scaled_e1_cf(w);
    return 0.5 * (s + std::polar(1.0, 2.0 * w.imag()) * std::conj(s));
  }
  const cplx y = -w;
  if (r <= asymptotic_radius) return -std::exp(-y) * re_ei_series(y);
  const cplx a = scaled_ei_asymptotic(y);
  return -0.5 * (a + std::polar(1.0, -2.0 * y.imag()) * std::conj(a));
}

double re_ein(cplx x) { return ein_series(x).real(); }

}  // namespace dbar::special
