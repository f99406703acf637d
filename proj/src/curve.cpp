#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dbar/geometry.hpp"

namespace dbar::geometry {

namespace {

struct Cluster {
  cplx center;
  int size;
};

// Groups nearby values; cluster centres are means, which are far better
// conditioned than the individual members of a multiple root.
std::vector<Cluster> cluster(const std::vector<cplx>& values, double rel_radius) {
  std::vector<int> label(values.size(), -1);
  std::vector<Cluster> out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (label[k] >= 0) continue;
    label[k] = int(out.size());
    std::vector<std::size_t> members{k};
    for (std::size_t q = 0; q < members.size(); ++q)
      for (std::size_t l = 0; l < values.size(); ++l)
        if (label[l] < 0 && std::abs(values[l] - values[members[q]]) <=
                                rel_radius * (1.0 + std::abs(values[members[q]]))) {
          label[l] = label[k];
          members.push_back(l);
        }
    cplx s{};
    for (auto m : members) s += values[m];
    out.push_back({s / double(members.size()), int(members.size())});
  }
  return out;
}

Polynomial swap_variables(const Polynomial& p) {
  std::map<Monomial, cplx> t;
  for (const auto& [m, c] : p.terms()) t[{m.second, m.first}] = c;
  return Polynomial(std::move(t));
}

// Sylvester determinant of P and ∂P/∂z2 as polynomials in z2 at fixed z1,
// together with Hadamard's bound for that determinant.
std::pair<cplx, double> sylvester(const Polynomial& p, cplx z1) {
  const auto a = p.coefficients_in_z2(z1);
  const int m = int(a.size()) - 1;
  if (m < 1) return {cplx{}, 1.0};
  std::vector<cplx> b(m);
  for (int k = 1; k <= m; ++k) b[k - 1] = double(k) * a[k];
  const int n = 2 * m - 1;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 0; r < m - 1; ++r)
    for (int k = 0; k <= m; ++k) s(r, r + k) = a[m - k];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= m - 1; ++k) s(m - 1 + r, r + k) = b[m - 1 - k];
  double bound = 1.0;
  for (int r = 0; r < n; ++r) bound *= std::max(s.row(r).norm(), 1e-300);
  return {s.fullPivLu().determinant(), bound};
}

// Coefficients (low → high in z1) of Res_{z2}(P, ∂P/∂z2); empty when it vanishes identically.
std::vector<cplx> discriminant_resultant(const Polynomial& p, bool& identically_zero) {
  const int m = p.degree_in_z2();
  identically_zero = false;
  if (m < 1) return {};
  const int bound = std::max(1, (2 * m - 1) * p.degree_in_z1());
  const int samples = bound + 1;
  std::vector<cplx> v(samples);
  double rel = 0.0;
  for (int k = 0; k < samples; ++k) {
    const auto [det, hadamard] = sylvester(p, std::polar(1.0, 2.0 * pi * k / samples));
    v[k] = det;
    rel = std::max(rel, std::abs(det) / hadamard);
  }
  if (rel < 1e-10) {
    identically_zero = true;
    return {};
  }
  std::vector<cplx> c(samples);
  double cmax = 0.0;
  for (int q = 0; q < samples; ++q) {
    cplx s{};
    for (int k = 0; k < samples; ++k) s += v[k] * std::polar(1.0, -2.0 * pi * double(q) * k / samples);
    c[q] = s / double(samples);
    cmax = std::max(cmax, std::abs(c[q]));
  }
  for (auto& x : c)
    if (std::abs(x) < 1e-11 * cmax) x = {};
  while (c.size() > 1 && c.back() == cplx{}) c.pop_back();
  return c;
}

double poly_scale(const Polynomial& p, cplx z1, cplx z2) {
  double s = 0.0;
  const double a1 = 1.0 + std::abs(z1), a2 = 1.0 + std::abs(z2);
  for (const auto& [m, c] : p.terms()) s += std::abs(c) * std::pow(a1, m.first) * std::pow(a2, m.second);
  return std::max(s, 1e-300);
}

std::string fmt(cplx z) {
  std::ostringstream o;
  o.precision(6);
  o << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
  return o.str();
}

// Tracks the z2-roots along a path; returns the end roots in the order of `start`.
std::vector<cplx> track(const Polynomial& p, const std::function<cplx(double)>& path,
                        std::vector<cplx> roots) {
  double s = 0.0, ds = 1.0 / 64;
  const std::size_t m = roots.size();
  while (s < 1.0) {
    const double s_next = std::min(1.0, s + ds);
    const auto cand = polynomial_roots(p.coefficients_in_z2(path(s_next)));
    bool ok = cand.size() == m;
    std::vector<cplx> next(m);
    if (ok) {
      double sep = 1e300;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) sep = std::min(sep, std::abs(roots[a] - roots[b]));
      std::vector<bool> used(m, false);
      for (std::size_t a = 0; a < m && ok; ++a) {
        std::size_t best = 0;
        double dbest = 1e300;
        for (std::size_t b = 0; b < m; ++b)
          if (double d = std::abs(cand[b] - roots[a]); d < dbest) dbest = d, best = b;
        if (used[best] || (m > 1 && dbest > 0.25 * sep)) ok = false;
        used[best] = true;
        next[a] = cand[best];
      }
    }
    if (!ok) {
      ds *= 0.5;
      if (ds < 1e-10) throw NumericalError("root tracking stalled (path too close to a critical value)");
      continue;
    }
    roots = std::move(next);
    s = s_next;
    ds = std::min(ds * 1.5, 1.0 / 32);
  }
  return roots;
}

std::vector<int> permutation(const std::vector<cplx>& start, const std::vector<cplx>& end) {
  std::vector<int> perm(start.size());
  for (std::size_t a = 0; a < start.size(); ++a) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < start.size(); ++b)
      if (std::abs(end[a] - start[b]) < std::abs(end[a] - start[best])) best = b;
    perm[a] = int(best);
  }
  return perm;
}

}  // namespace

// ---------------------------------------------------------------------------

AlgebraicCurve::AlgebraicCurve(Polynomial p) : p_(std::move(p)) {
  if (p_.is_zero()) throw InputError("AlgebraicCurve: zero polynomial");
  if (p_.total_degree() < 1) throw InputError("AlgebraicCurve: constant polynomial");
  scale_ = 0.0;
  for (const auto& [m, c] : p_.terms()) scale_ = std::max(scale_, std::abs(c));

  bool zero2 = false, zero1 = false;
  resultant_ = discriminant_resultant(p_, zero2);
  discriminant_resultant(swap_variables(p_), zero1);
  if (zero1 || zero2) throw InputError("AlgebraicCurve: polynomial is not square-free");

  const auto top = p_.top_form_in_slope();
  double tmax = 0.0;
  for (auto c : top) tmax = std::max(tmax, std::abs(c));
  int deg = int(top.size()) - 1;
  while (deg > 0 && std::abs(top[deg]) <= 1e-14 * tmax) --deg;
  vertical_infinity_ = deg < p_.total_degree();
  const auto slopes = polynomial_roots(std::span<const cplx>(top.data(), deg + 1));
  for (const auto& c : cluster(slopes, 1e-6)) infinity_.push_back({c.center, c.size});
}

int AlgebraicCurve::genus() const {
  const int d = degree();
  return (d - 1) * (d - 2) / 2;
}

double AlgebraicCurve::default_r0() const {
  const int d = degree();
  double top = 0.0, all = 0.0;
  for (const auto& [m, c] : p_.terms()) {
    all = std::max(all, std::abs(c));
    if (m.first + m.second == d) top = std::max(top, std::abs(c));
  }
  return 2.0 * (1.0 + all / top);
}

std::vector<BranchPoint> branch_points(const AlgebraicCurve& curve) {
  const Polynomial& p = curve.polynomial();
  if (p.degree_in_z2() < 1) return {};
  const Polynomial p1 = p.d_z1(), p2 = p.d_z2(), p22 = p2.d_z2(), p21 = p2.d_z1();

  const auto& res = curve.discriminant();
  const auto z1_roots = polynomial_roots(res);
  std::vector<BranchPoint> out;
  int total = 0;
  for (const auto& c1 : cluster(z1_roots, 1e-5)) {
    total += c1.size;
    const auto z2_roots = polynomial_roots(p.coefficients_in_z2(c1.center));
    for (const auto& c2 : cluster(z2_roots, 1e-3)) {
      if (c2.size < 2) continue;
      cplx z1 = c1.center, z2 = c2.center;
      // Newton on (P, ∂P/∂z2) = 0; steps are only kept while the residual drops.
      auto resid = [&](cplx a, cplx b) {
        return std::abs(p(a, b)) / poly_scale(p, a, b) + std::abs(p2(a, b)) / poly_scale(p2, a, b);
      };
      for (int it = 0; it < 60; ++it) {
        const cplx f = p(z1, z2), g = p2(z1, z2);
        const cplx a = p1(z1, z2), b = g, c = p21(z1, z2), d = p22(z1, z2);
        const cplx det = a * d - b * c;
        if (std::abs(det) == 0.0) break;
        const cplx dz1 = (d * f - b * g) / det, dz2 = (a * g - c * f) / det;
        const cplx n1 = z1 - dz1, n2 = z2 - dz2;
        if (!(resid(n1, n2) < resid(z1, z2))) break;
        z1 = n1, z2 = n2;
      }
      const double r = resid(z1, z2);
      if (!(r < 1e-8))
        throw NumericalError("branch_points: incomplete enumeration, residual " + std::to_string(r) +
                             " at z1 = " + fmt(z1));
      const bool simple = std::abs(p22(z1, z2)) > 1e-6 * poly_scale(p22, z1, z2);
      out.push_back({z1, z2, simple, c1.size});
    }
  }
  if (total != int(res.size()) - 1)
    throw NumericalError("branch_points: root count does not match resultant degree");
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::diagnostic_failure: return "diagnostic_failure";
  }
  return "?";
}

Monodromy monodromy(const AlgebraicCurve& curve) {
  const Polynomial& p = curve.polynomial();
  const int m = p.degree_in_z2();
  Monodromy mono;
  std::vector<cplx> crit;
  for (const auto& c : cluster(polynomial_roots(curve.discriminant()), 1e-5)) crit.push_back(c.center);
  double rmax = 0.0;
  for (auto c : crit) rmax = std::max(rmax, std::abs(c));
  // Generic base point outside every critical value.
  mono.base = (rmax + 1.0) * std::polar(1.37, 0.5373);
  if (m <= 1) {
    mono.transitive = m == 1;
    return mono;
  }
  const auto start = polynomial_roots(p.coefficients_in_z2(mono.base));
  for (std::size_t k = 0; k < crit.size(); ++k) {
    const cplx c = crit[k];
    double gap = std::abs(mono.base - c);
    for (std::size_t l = 0; l < crit.size(); ++l)
      if (l != k) gap = std::min(gap, std::abs(crit[l] - c));
    const double rho = 0.3 * gap;
    const cplx u = (mono.base - c) / std::abs(mono.base - c);
    const cplx touch = c + rho * u;
    auto roots = track(p, [&](double s) { return mono.base + s * (touch - mono.base); }, start);
    roots = track(p, [&](double s) { return c + rho * u * std::polar(1.0, 2.0 * pi * s); }, roots);
    roots = track(p, [&](double s) { return touch + s * (mono.base - touch); }, roots);
    mono.generators.push_back(permutation(start, roots));
  }
  std::vector<bool> seen(m, false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (const auto& g : mono.generators)
      if (!seen[g[s]]) seen[g[s]] = true, stack.push_back(g[s]);
  }
  mono.transitive = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  return mono;
}

ValidationReport validate_embedding(const AlgebraicCurve& curve, std::optional<double> r0_opt) {
  const Polynomial& p = curve.polynomial();
  const Polynomial p1 = p.d_z1(), p2 = p.d_z2();
  ValidationReport rep;
  rep.degree = curve.degree();
  rep.infinity_count = curve.infinity_count();
  rep.genus = curve.genus();
  rep.r0 = r0_opt.value_or(curve.default_r0());
  if (!(rep.r0 > 0.0)) throw InputError("validate_embedding: r0 must be positive");
  rep.planar = rep.degree == 1;
  if (rep.planar) rep.notes.push_back("d = 1: planar model V ≅ C; curve machinery is bypassed");

  // i) transversal intersection with the line at infinity in d distinct points (0 : 1 : a).
  {
    auto& r = rep.distinct_infinity;
    int multiple = 0;
    for (const auto& a : curve.infinity_points()) {
      if (a.multiplicity > 1) {
        ++multiple;
        r.witnesses.push_back({cplx{1.0}, a.slope});
      }
    }
    const int missing = rep.degree -
                        std::accumulate(curve.infinity_points().begin(), curve.infinity_points().end(), 0,
                                        [](int s, const InfinityPoint& a) { return s + a.multiplicity; });
    if (curve.vertical_point_at_infinity()) {
      r.verdict = Verdict::fail;
      r.witnesses.push_back({cplx{0.0}, cplx{1.0}});
      r.detail = "(0:0:1) lies on the closure with multiplicity " + std::to_string(missing) +
                 "; the degree form loses degree in the slope";
    } else if (multiple > 0) {
      r.verdict = Verdict::fail;
      r.detail = std::to_string(multiple) + " repeated slope(s) at infinity";
    } else {
      r.detail = std::to_string(rep.infinity_count) + " distinct slopes at infinity";
    }
  }
  if (rep.infinity_count != rep.genus + 2)
    rep.warnings.push_back("d = " + std::to_string(rep.infinity_count) + " differs from g + 2 = " +
                           std::to_string(rep.genus + 2));

  // ii) gradient dominance for |z1| ≥ r0 and connectivity.
  {
    auto& r = rep.connected_dominated;
    if (p.degree_in_z2() < 1) {
      r.verdict = Verdict::fail;
      r.detail = "∂P/∂z2 vanishes identically";
      rep.gradient_constant = INFINITY;
    } else {
      double cmax = 0.0;
      cplx w1, w2;
      for (double rad : {rep.r0, 2 * rep.r0, 4 * rep.r0})
        for (int k = 0; k < 64; ++k) {
          const cplx z1 = rad * std::polar(1.0, 2.0 * pi * (k + 0.5) / 64);
          for (cplx z2 : polynomial_roots(p.coefficients_in_z2(z1))) {
            const double ratio = std::abs(p1(z1, z2)) / std::abs(p2(z1, z2));
            if (ratio > cmax) cmax = ratio, w1 = z1, w2 = z2;
          }
        }
      rep.gradient_constant = cmax;
      if (cmax > 0.0) r.witnesses.push_back({w1, w2});
      try {
        const auto mono = monodromy(curve);
        std::ostringstream d;
        d << "sup |P_z1|/|P_z2| on |z1| in {r0, 2r0, 4r0} = " << cmax << "; monodromy over "
          << mono.generators.size() << " lasso(s) is " << (mono.transitive ? "" : "not ") << "transitive";
        r.detail = d.str();
        if (!mono.transitive || !std::isfinite(cmax)) r.verdict = Verdict::fail;
      } catch (const NumericalError& e) {
        r.verdict = Verdict::diagnostic_failure;
        r.detail = e.what();
      }
    }
  }

  // iii), iv) at the common zeros of P and ∂P/∂z2.
  try {
    if (p.degree_in_z2() < 1) {
      rep.simple_branching = {Verdict::fail, "∂P/∂z2 vanishes on all of V", {}};
    } else {
      const auto bps = branch_points(curve);
      int nonsimple = 0, singular = 0;
      for (const auto& b : bps) {
        if (!b.simple) ++nonsimple, rep.simple_branching.witnesses.push_back({b.z1, b.z2});
        if (std::abs(p1(b.z1, b.z2)) < 1e-8 * poly_scale(p1, b.z1, b.z2) + 1e-12)
          ++singular, rep.regular.witnesses.push_back({b.z1, b.z2});
      }
      rep.simple_branching.verdict = nonsimple ? Verdict::fail : Verdict::pass;
      rep.simple_branching.detail = std::to_string(bps.size()) + " branch point(s), " +
                                    std::to_string(nonsimple) + " non-simple";
      rep.regular.verdict = singular ? Verdict::fail : Verdict::pass;
      rep.regular.detail = std::to_string(singular) + " singular point(s)";
    }
  } catch (const NumericalError& e) {
    rep.simple_branching = {Verdict::diagnostic_failure, e.what(), {}};
    rep.regular = {Verdict::diagnostic_failure, e.what(), {}};
  }
  if (rep.regular.detail.empty()) rep.regular.detail = "gradient (P_z1, P_z2) has P_z1 ≠ 0 wherever P_z2 = 0";
  return rep;
}

nlohmann::json ValidationReport::to_json() const {
  auto cond = [](const ConditionResult& c) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& p : c.witnesses)
      w.push_back({p[0].real(), p[0].imag(), p[1].real(), p[1].imag()});
    return nlohmann::json{{"verdict", to_string(c.verdict)}, {"detail", c.detail}, {"witnesses", w}};
  };
  return {{"degree", degree},
          {"infinity_count", infinity_count},
          {"genus", genus},
          {"r0", r0},
          {"gradient_constant", std::isfinite(gradient_constant) ? nlohmann::json(gradient_constant)
                                                                 : nlohmann::json("inf")},
          {"planar", planar},
          {"conditions",
           {{"i", cond(distinct_infinity)},
            {"ii", cond(connected_dominated)},
            {"iii", cond(simple_branching)},
            {"iv", cond(regular)}}},
          {"notes", notes},
          {"warnings", warnings}};
}

double CurveSampling::total_weight() const {
  double s = 0.0;
  for (const auto& x : samples) s += x.weight;
  return s;
}

CurveSampling sample_curve(const AlgebraicCurve& curve, const Box& region, int n) {
  if (n < 1) throw InputError("sample_curve: density must be positive");
  const double wx = region.upper.real() - region.lower.real();
  const double wy = region.upper.imag() - region.lower.imag();
  if (!(wx > 0.0 && wy > 0.0)) throw InputError("sample_curve: empty region");
  const Polynomial& p = curve.polynomial();
  const Polynomial p1 = p.d_z1(), p2 = p.d_z2();
  const double hx = wx / n, hy = wy / n, area = hx * hy;
  CurveSampling out;
  out.samples.reserve(std::size_t(n) * n * std::max(1, p.degree_in_z2()));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx z1 = region.lower + cplx((i + 0.5) * hx, (j + 0.5) * hy);
      const auto roots = polynomial_roots(p.coefficients_in_z2(z1));
      if (int(roots.size()) != p.degree_in_z2())
        throw NumericalError("sample_curve: a sheet escapes to infinity at z1 = " + fmt(z1));
      for (int s = 0; s < int(roots.size()); ++s) {
        const cplx z2 = roots[s];
        const cplx a = p1(z1, z2), b = p2(z1, z2);
        if (std::abs(b) < 1e-8 * poly_scale(p2, z1, z2) + 1e-14)
          throw NumericalError("sample_curve: sample at z1 = " + fmt(z1) + " is too close to a branch point");
        const double slope = std::norm(a / b);
        out.samples.push_back(
            {z1, z2, (1.0 + slope) * area, std::abs(b) >= std::abs(a) ? Chart::z1 : Chart::z2, s});
      }
    }
  return out;
}

}  // namespace dbar::geometry
