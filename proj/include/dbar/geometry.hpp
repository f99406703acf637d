#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dbar/grid.hpp"

namespace dbar::geometry {

// ---------------------------------------------------------------------------
// Plane domains

struct BoundaryNode {
  double param;   // curve parameter t ∈ [0, 2π)
  cplx point;
  cplx normal;    // outward unit normal
  double weight;  // arclength quadrature weight
};

/// A bounded planar domain X with a smooth closed boundary sampled at N_b
/// equispaced parameter values, plus an interior grid whose square strictly
/// contains X̄. Circles are the executable case for the forward solver.
class PlaneDomain {
 public:
  struct Curve {
    std::function<cplx(double)> point;       // t ↦ γ(t), positively oriented
    std::function<cplx(double)> derivative;  // t ↦ γ'(t)
  };

  static PlaneDomain disk(double radius = 1.0, int boundary_nodes = 128, int grid_n = 128);
  PlaneDomain(Curve curve, int boundary_nodes, int grid_n, double grid_half_width);

  const std::vector<BoundaryNode>& boundary() const { return nodes_; }
  int boundary_size() const { return int(nodes_.size()); }
  const Grid2D& grid() const { return grid_; }
  const Curve& curve() const { return curve_; }

  double boundary_length() const;
  bool is_circle() const { return radius_.has_value(); }
  double radius() const;
  bool contains(cplx z) const;
  /// 1 where the grid node lies in X, 0 elsewhere.
  RealField interior_mask() const;

  PlaneDomain with_resolution(int boundary_nodes, int grid_n) const;

 private:
  Curve curve_;
  std::vector<BoundaryNode> nodes_;
  Grid2D grid_;
  std::optional<double> radius_;
};

// ---------------------------------------------------------------------------
// Polynomials in (z1, z2)

using Monomial = std::pair<int, int>;

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::map<Monomial, cplx> terms);

  /// Parses "i j re im" lines; '#' starts a comment.
  static Polynomial parse(const std::string& text);
  std::string to_string() const;

  const std::map<Monomial, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;
  int degree_in_z1() const;
  int degree_in_z2() const;

  cplx operator()(cplx z1, cplx z2) const;
  Polynomial d_z1() const;
  Polynomial d_z2() const;

  /// Coefficients of P as a polynomial in z2 with z1 fixed (low → high).
  std::vector<cplx> coefficients_in_z2(cplx z1) const;
  /// Top-degree form evaluated along the direction (1, t): coefficients in t.
  std::vector<cplx> top_form_in_slope() const;

  /// P̃(w0, w1, w2) with P(z1, z2) = P̃(1, z1, z2); key = (a0, a1, a2).
  std::map<std::array<int, 3>, cplx> homogenize() const;
  static Polynomial dehomogenize(const std::map<std::array<int, 3>, cplx>& h);

  bool operator==(const Polynomial&) const = default;

 private:
  std::map<Monomial, cplx> terms_;
};

/// Roots of Σ c_k x^k (coefficients low → high) via companion-matrix
/// eigenvalues and Newton polishing. Leading zeros are trimmed.
std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs);
cplx horner(std::span<const cplx> coeffs, cplx x);

// ---------------------------------------------------------------------------
// Algebraic curves

struct BranchPoint {
  cplx z1;
  cplx z2;
  bool simple;       // ∂²P/∂z2² ≠ 0
  int multiplicity;  // multiplicity as a root of the discriminant resultant
};

struct InfinityPoint {
  cplx slope;  // a_j = (0 : 1 : slope)
  int multiplicity;
};

class AlgebraicCurve {
 public:
  explicit AlgebraicCurve(Polynomial p);

  const Polynomial& polynomial() const { return p_; }
  int degree() const { return p_.total_degree(); }
  /// Number of distinct points at infinity (d).
  int infinity_count() const { return int(infinity_.size()); }
  /// Smooth plane-curve genus (d_P − 1)(d_P − 2)/2.
  int genus() const;
  double default_r0() const;
  const std::vector<InfinityPoint>& infinity_points() const { return infinity_; }
  /// True when the z2^{d_P} coefficient vanishes, i.e. (0:0:1) lies on the closure.
  bool vertical_point_at_infinity() const { return vertical_infinity_; }
  /// Coefficients (low → high in z1) of Res_{z2}(P, ∂P/∂z2).
  const std::vector<cplx>& discriminant() const { return resultant_; }
  double scale() const { return scale_; }

 private:
  Polynomial p_;
  std::vector<InfinityPoint> infinity_;
  bool vertical_infinity_ = false;
  std::vector<cplx> resultant_;
  double scale_ = 1.0;
};

/// Common zeros of P and ∂P/∂z2 with simplicity flags. Throws NumericalError
/// when the enumeration cannot be certified.
std::vector<BranchPoint> branch_points(const AlgebraicCurve& curve);

enum class Verdict { pass, fail, diagnostic_failure };
std::string to_string(Verdict v);

struct ConditionResult {
  Verdict verdict = Verdict::pass;
  std::string detail;
  std::vector<std::array<cplx, 2>> witnesses;
};

struct ValidationReport {
  ConditionResult distinct_infinity;    // i)
  ConditionResult connected_dominated;  // ii)
  ConditionResult simple_branching;     // iii)
  ConditionResult regular;              // iv)
  int degree = 0;
  int infinity_count = 0;
  int genus = 0;
  double r0 = 0.0;
  double gradient_constant = 0.0;
  bool planar = false;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

ValidationReport validate_embedding(const AlgebraicCurve& curve, std::optional<double> r0 = {});

/// Permutations of the z2-sheets over a base point induced by lassos around
/// every critical value of the projection to z1.
struct Monodromy {
  cplx base;
  std::vector<std::vector<int>> generators;
  bool transitive = false;
};
Monodromy monodromy(const AlgebraicCurve& curve);

// ---------------------------------------------------------------------------
// Sampling

enum class Chart { z1, z2 };

struct CurveSample {
  cplx z1;
  cplx z2;
  double weight;  // area of the induced Euclidean metric carried by this sample
  Chart chart;
  int sheet;
};

struct CurveSampling {
  std::vector<CurveSample> samples;
  double total_weight() const;
};

struct Box {
  cplx lower;
  cplx upper;
};

/// Midpoint sampling over an n×n cell partition of `region` (a box in z1) on every sheet.
CurveSampling sample_curve(const AlgebraicCurve& curve, const Box& region, int n);

}  // namespace dbar::geometry
