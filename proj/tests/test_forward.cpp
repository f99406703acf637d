#include <gtest/gtest.h>

#include <boost/numeric/odeint.hpp>

#include <random>

#include "dbar/forward.hpp"

using namespace dbar;
using geometry::PlaneDomain;

namespace {

ConductivityField gaussian(double amp = 0.5, cplx center = 0.0) {
  return make_phantom("gaussian", {{"amp", amp}, {"center", {center.real(), center.imag()}}, {"width", 0.3}});
}

Eigen::VectorXd boundary_values(const PlaneDomain& d, const std::function<double(cplx)>& f) {
  Eigen::VectorXd v(d.boundary_size());
  for (int k = 0; k < v.size(); ++k) v[k] = f(d.boundary()[k].point);
  return v;
}

double max_error_in_disk(const RealField& u, const Grid2D& g, const std::function<double(cplx)>& f) {
  double e = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i)
      if (std::abs(g.point(i, j)) <= 1.0) e = std::max(e, std::abs(u(i, j) - f(g.point(i, j))));
  return e;
}

}  // namespace

TEST(Dirichlet, HarmonicPolynomials) {
  const auto d = PlaneDomain::disk(1.0, 128, 128);
  const auto one = make_phantom("constant");
  auto rez = [](cplx z) { return z.real(); };
  auto rez2 = [](cplx z) { return (z * z).real(); };
  EXPECT_LT(max_error_in_disk(solve_dirichlet(one, d, boundary_values(d, rez)), d.grid(), rez), 1e-6);
  EXPECT_LT(max_error_in_disk(solve_dirichlet(one, d, boundary_values(d, rez2)), d.grid(), rez2), 1e-6);
}

TEST(Dirichlet, RadialConductivityMatchesOdeShooting) {
  const auto s = gaussian();
  // U = R(r) cos θ with (rσR')' = σR/r, R regular at 0.
  using State = std::array<double, 2>;
  auto rhs = [&](const State& y, State& dy, double r) {
    const Jet j = s.jet(r);
    dy[0] = y[1];
    dy[1] = -(1.0 / r + j.dx / j.value) * y[1] + y[0] / (r * r);
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_dense_output(1e-12, 1e-12, ode::runge_kutta_dopri5<State>());
  const double r0 = 1e-5;
  std::vector<double> radii, values;
  for (int k = 1; k <= 20; ++k) radii.push_back(0.05 * k);
  State y{r0, 1.0};
  ode::integrate_times(stepper, rhs, y, [&] {
    std::vector<double> t{r0};
    t.insert(t.end(), radii.begin(), radii.end());
    return t;
  }(), 1e-3, [&](const State& st, double) { values.push_back(st[0]); });
  values.erase(values.begin());
  const double scale = values.back();

  const PlaneDomain fine = PlaneDomain::disk(1.0, 64, 200);
  const RealField uf =
      solve_dirichlet(s, fine, boundary_values(fine, [](cplx z) { return std::cos(std::arg(z)); }));
  double err = 0.0;
  const Grid2D& g = fine.grid();
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      const cplx z = g.point(i, j);
      const double r = std::abs(z);
      if (r < 0.05 || r > 1.0) continue;
      // piecewise-cubic interpolation of the ODE profile is far below the tolerance at Δr = 0.05
      const int k = std::min(18, std::max(1, int(r / 0.05) - 1));
      double rr = 0.0;
      for (int a = k - 1; a <= k + 2 && a < 20; ++a) {
        double w = 1.0;
        for (int b = k - 1; b <= k + 2 && b < 20; ++b)
          if (b != a) w *= (r - radii[b]) / (radii[a] - radii[b]);
        rr += w * values[a];
      }
      err = std::max(err, std::abs(uf(i, j) - rr / scale * std::cos(std::arg(z))));
    }
  EXPECT_LT(err, 1e-4);
}

TEST(DtN, UnitConductivityGivesIdenticalOperators) {
  const auto d = PlaneDomain::disk(1.0, 64, 32);
  const auto dtn = dtn_operators(make_phantom("constant"), d);
  EXPECT_EQ((dtn.phi - dtn.phi0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DtN, TraceOfHolomorphicDataVanishes) {
  const auto d = PlaneDomain::disk(1.0, 64, 32);
  const auto phi0 = phi0_matrix(64, 1.0);
  Eigen::VectorXcd z(64), one = Eigen::VectorXcd::Ones(64), z5(64);
  for (int k = 0; k < 64; ++k) {
    z[k] = d.boundary()[k].point;
    z5[k] = std::pow(z[k], 5);
  }
  EXPECT_LT((phi0 * z).norm(), 1e-12);
  EXPECT_LT((phi0 * z5).norm(), 1e-11);
  EXPECT_LT((phi0 * one).norm(), 1e-12);
  // anti-holomorphic data has the full trace −(i/2)·2|n| z̄^n
  Eigen::VectorXcd zb = z.conjugate();
  EXPECT_LT((phi0 * zb - (-I) * zb).norm(), 1e-11);
}

TEST(DtN, ExactLaplaceMatchesCollocation) {
  const Eigen::MatrixXd exact = laplace_dtn(32, 1.0);
  const auto one = [](cplx) { return Jet{1.0, 0.0, 0.0, 0.0}; };
  const Eigen::MatrixXd num = PolarSolver::conductivity(one, {41, 32}).dtn();
  EXPECT_LT((exact - num).cwiseAbs().maxCoeff(), 1e-8);
}

class GaussianDtN : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dtn_ = new DtNData(dtn_operators(gaussian(0.5, cplx(0.1, -0.05)), PlaneDomain::disk(1.0, 64, 32)));
  }
  static void TearDownTestSuite() { delete dtn_; }
  static DtNData* dtn_;
};
DtNData* GaussianDtN::dtn_ = nullptr;

TEST_F(GaussianDtN, BilinearFormIsSymmetric) {
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  const Eigen::MatrixXd lam = laplace_dtn(64, 1.0) + dtn_->lambda_diff;
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd u(64), v(64);
    for (int k = 0; k < 64; ++k) u[k] = n(rng), v[k] = n(rng);
    const double a = u.dot(lam * v), b = v.dot(lam * u);
    // normalised by the Cauchy–Schwarz bound of |a|, which does not vanish by accident
    EXPECT_LT(std::abs(a - b) / (u.norm() * (lam * v).norm()), 1e-8);
  }
}

TEST_F(GaussianDtN, DifferenceIsNonzeroAndCompressible) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dtn_->phi - dtn_->phi0);
  const auto& s = svd.singularValues();
  EXPECT_GT(s[0], 1e-3);
  for (int k = 64 / 4 + 1; k < 64; ++k) EXPECT_LT(s[k] / s[0], 0.1);
}

TEST_F(GaussianDtN, NoiseIsReproducible) {
  DtNData a = *dtn_, b = *dtn_;
  add_noise(a, 1e-3, 42);
  add_noise(b, 1e-3, 42);
  EXPECT_EQ((a.phi - b.phi).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT((a.phi - dtn_->phi).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DtN, EntriesConvergeUnderRadialRefinement) {
  const auto s = gaussian();
  auto jet = [&](cplx z) { return s.jet(z); };
  const auto one = [](cplx) { return Jet{1.0, 0.0, 0.0, 0.0}; };
  std::vector<Eigen::MatrixXd> d;
  for (int n : {15, 21, 31})
    d.push_back(PolarSolver::conductivity(jet, {n, 32}).dtn() - PolarSolver::conductivity(one, {n, 32}).dtn());
  const double e1 = (d[0] - d[2]).cwiseAbs().maxCoeff(), e2 = (d[1] - d[2]).cwiseAbs().maxCoeff();
  EXPECT_GT(std::log(e1 / e2) / std::log(21.0 / 15.0), 1.5);
}

TEST(DtN, SingularityProfileIsBoundedAndScalesWithAmplitude) {
  const auto s = gaussian(0.4);
  std::vector<double> ratio;
  for (int nb : {64, 128, 256})
    ratio.push_back(singularity_profile(dtn_operators(s, PlaneDomain::disk(1.0, nb, 32), {41, 64})).max_ratio);
  EXPECT_EQ(singularity_profile(dtn_operators(make_phantom("constant"), PlaneDomain::disk(1.0, 64, 32))).max_ratio,
            0.0);
  const double lo = *std::min_element(ratio.begin(), ratio.end());
  const double hi = *std::max_element(ratio.begin(), ratio.end());
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi / lo, 2.0);

  // doubling q̂ (to first order: doubling log σ)
  const auto s2 = make_phantom("gaussian", {{"amp", std::pow(1.4, 2) - 1.0}, {"center", 0.0}, {"width", 0.3}});
  const double r2 = singularity_profile(dtn_operators(s2, PlaneDomain::disk(1.0, 128, 32), {41, 64})).max_ratio;
  EXPECT_GE(r2 / ratio[1], 1.5);
  EXPECT_LE(r2 / ratio[1], 3.0);
}

TEST(Reduction, ResidualsVanishUnderRefinementForForwardSolutions) {
  const auto s = gaussian();
  const cplx lambda(0.8, 0.3);
  std::vector<double> rf, rm, ru;
  for (int n : {32, 64, 128}) {
    const auto d = PlaneDomain::disk(1.0, 64, n);
    Eigen::VectorXcd u(64);
    for (int k = 0; k < 64; ++k) u[k] = std::exp(lambda * d.boundary()[k].point);
    const ComplexField f = solve_dirichlet(s, d, u);
    const auto red = first_order_reduction(f, s, lambda, d.grid());
    rf.push_back(red.residual_f(0.8));
    rm.push_back(red.residual_m(0.8));
    ru.push_back(red.residual_u(0.8));
  }
  for (const auto* r : {&rf, &rm, &ru}) {
    EXPECT_GT(std::log2((*r)[0] / (*r)[1]), 1.0);
    EXPECT_GT(std::log2((*r)[1] / (*r)[2]), 1.0);
  }
}
