#pragma once

#include "dbar/constants.hpp"

namespace dbar::special {

/// Principal-branch exponential integral E1(w), w ≠ 0.
cplx e1(cplx w);

/// Re E1(w); single-valued across the branch cut.
double re_e1(cplx w);

/// e^{w} · Re E1(w), evaluated without forming the (possibly huge) factors separately.
cplx scaled_re_e1(cplx w);

/// Re Ei(x) = γ + ln|x| + Re Σ_{n≥1} x^n/(n·n!) = −Re E1(−x).
inline double re_ei(cplx x) { return -re_e1(-x); }

/// Entire part Re Σ_{n≥1} x^n/(n·n!) of Re Ei; accurate for |x| up to a few tens.
double re_ein(cplx x);

}  // namespace dbar::special
