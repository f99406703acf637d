#include <gtest/gtest.h>

#include <random>

#include "dbar/boundary.hpp"
#include "dbar/faddeev.hpp"

using namespace dbar;
using geometry::PlaneDomain;

namespace {

ConductivityField gaussian(double amp = 0.5) {
  return make_phantom("gaussian", {{"amp", amp}, {"center", 0.0}, {"width", 0.3}});
}

PlaneDomain ellipse(double a, double b, int nb) {
  PlaneDomain::Curve c{[=](double t) { return cplx(a * std::cos(t), b * std::sin(t)); },
                       [=](double t) { return cplx(-a * std::sin(t), b * std::cos(t)); }};
  return PlaneDomain(c, nb, 32, std::max(a, b) * 1.1);
}

TestField exponential(cplx a, cplx b) {
  auto e = [=](cplx z) { return std::exp(a * z + b * std::conj(z)); };
  return {e, [=](cplx z) { return a * e(z); }, [=](cplx z) { return b * e(z); }, [=](cplx z) { return a * b * e(z); }};
}

}  // namespace

TEST(KressWeights, IntegrateLogSineExactly) {
  // ∫ ln(4 sin²((t − τ)/2)) dτ = 0 and ∫ ln(4 sin²((t − τ)/2)) cos(mτ) dτ = −(2π/m) cos(mt)
  const int n = 32;
  const auto r = kress_log_weights(n);
  for (int k = 0; k < n; ++k) {
    const double t = 2 * pi * k / n;
    EXPECT_NEAR(r.row(k).sum(), 0.0, 1e-13);
    for (int m : {1, 3, 7}) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += r(k, j) * std::cos(m * 2 * pi * j / n);
      EXPECT_NEAR(s, -2 * pi / m * std::cos(m * t), 1e-12);
    }
  }
}

TEST(BoundaryTrace, UnitConductivityGivesPlaneWave) {
  const auto d = PlaneDomain::disk(1.0, 64, 32);
  const auto dtn = dtn_operators(make_phantom("constant"), d);
  const cplx l(1.3, -0.6);
  const auto t = solve_psi_boundary(dtn, l);
  for (int k = 0; k < t.size(); ++k) EXPECT_EQ(t.psi[k], std::exp(l * d.boundary()[k].point));
  for (cplx z : {cplx(1.5, 0), cplx(0, -2.5)})
    EXPECT_LT(std::abs(exterior_extend(t, dtn, z).psi - std::exp(l * z)), 1e-6 * std::abs(std::exp(l * z)));
  EXPECT_THROW(solve_psi_boundary(dtn, 0.0), InputError);
}

class GaussianBoundary : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dtn_ = new DtNData(dtn_operators(gaussian(), PlaneDomain::disk(1.0, 128, 128)));
    q_ = new PotentialField(potential_q(gaussian(), Grid2D(128, 1.1)));
  }
  static void TearDownTestSuite() {
    delete dtn_;
    delete q_;
  }
  static double trace_error(cplx l) {
    const auto t = solve_psi_boundary(*dtn_, l);
    const auto s = solve_mu_interior(*q_, l);
    double num = 0, den = 0;
    for (int k = 0; k < t.size(); ++k) {
      const cplx z = t.nodes[k].point, ref = std::exp(l * z) * mu_at(s, z);
      num += std::norm(t.psi[k] - ref);
      den += std::norm(ref);
    }
    return std::sqrt(num / den);
  }
  static DtNData* dtn_;
  static PotentialField* q_;
};
DtNData* GaussianBoundary::dtn_ = nullptr;
PotentialField* GaussianBoundary::q_ = nullptr;

TEST_F(GaussianBoundary, MatchesInteriorSolver) {
  for (cplx l : {cplx(1, 0), cplx(1.5, 0.5), cplx(0, 2)}) EXPECT_LT(trace_error(l), 0.02) << l;
}

TEST_F(GaussianBoundary, SweepUpToRadiusFour) {
  double worst = 0.0;
  for (double r : {0.5, 2.0, 4.0})
    for (int k = 0; k < 4; ++k) worst = std::max(worst, trace_error(std::polar(r, 0.3 + k * pi / 2)));
  RecordProperty("max_error", std::to_string(worst));
  EXPECT_LT(worst, 0.05);
}

TEST_F(GaussianBoundary, TraceMetadata) {
  const auto t = solve_psi_boundary(*dtn_, cplx(1.5, 0.5));
  EXPECT_LT(t.residual, 1e-8);
  EXPECT_LT(t.condition, 1e8);
  EXPECT_LT(t.coefficient_tail, 1e-12);
  EXPECT_EQ(std::abs(t.psi[t.z_star]), t.psi.cwiseAbs().maxCoeff());
  EXPECT_EQ(t.metadata()["z_star"]["index"], t.z_star);
}

TEST_F(GaussianBoundary, ExteriorExtensionMatchesInteriorSolver) {
  const cplx l = 1.0;
  const auto t = solve_psi_boundary(*dtn_, l);
  const auto s = solve_mu_interior(*q_, l);
  const cplx z = 1.5;
  const cplx ref = std::exp(l * z) * mu_at(s, z);
  const auto v = exterior_extend(t, *dtn_, z);
  EXPECT_FALSE(v.warning);
  EXPECT_LT(std::abs(v.psi - ref), 0.02 * std::abs(ref));
  EXPECT_TRUE(exterior_extend(t, *dtn_, 1.01).warning.has_value());
  EXPECT_THROW(exterior_extend(t, *dtn_, 0.5), InputError);
}

TEST_F(GaussianBoundary, AsymptoticFlatnessAlongRay) {
  const cplx l(1.0, 0.5);
  const auto t = solve_psi_boundary(*dtn_, l);
  const cplx dir = std::polar(1.0, 0.7);
  double prev = INFINITY;
  for (double r : {1.5, 2.0, 3.0, 4.0}) {
    const double dev = std::abs(exterior_extend(t, *dtn_, r * dir).psi * std::exp(-l * r * dir) - 1.0);
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST_F(GaussianBoundary, ExternalTableKernelGivesTheSameTrace) {
  const cplx l(0.8, -0.3);
  const auto& nodes = dtn_->nodes;
  std::vector<cplx> pts;
  for (const auto& b : nodes) pts.push_back(b.point);
  const int n = int(pts.size());
  Eigen::MatrixXcd e(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) e(a, b) = a == b ? faddeev_g_smooth(0.0, l) : faddeev_e(pts[a] - pts[b], l);
  const TableKernel table(l, pts, pts, e);
  const auto a = solve_psi_boundary(*dtn_, table, l), b = solve_psi_boundary(*dtn_, l);
  EXPECT_LT((a.psi - b.psi).norm(), 1e-10 * b.psi.norm());
}

TEST(BoundaryOperator, NormGrowsWithContrast) {
  std::vector<double> norms;
  const cplx l(1.0, 1.0);
  for (double amp : {0.0, 0.1, 0.2, 0.4}) {
    const auto dtn = dtn_operators(amp == 0.0 ? make_phantom("constant") : gaussian(amp), PlaneDomain::disk(1.0, 64, 32));
    const Eigen::MatrixXcd k = boundary_operator(dtn, l);
    norms.push_back(k.operatorNorm());
    if (amp <= 0.2) {
      const double rho = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(k).eigenvalues().cwiseAbs().maxCoeff();
      EXPECT_LT(rho, 1.0);
    }
  }
  EXPECT_EQ(norms[0], 0.0);
  for (int i = 1; i < 4; ++i) EXPECT_GT(norms[i], norms[i - 1]);
}

TEST(GreenRiemann, PolynomialPairs) {
  const auto d = PlaneDomain::disk(1.0, 128, 16);
  const TestField z{[](cplx w) { return w; }, [](cplx) { return cplx(1); }, [](cplx) { return cplx(0); },
                    [](cplx) { return cplx(0); }};
  const TestField zb{[](cplx w) { return std::conj(w); }, [](cplx) { return cplx(0); }, [](cplx) { return cplx(1); },
                     [](cplx) { return cplx(0); }};
  EXPECT_LT(green_riemann_residual(z, zb, d).residual(), 1e-8);
  const TestField f{[](cplx w) { return w * w * std::conj(w); }, [](cplx w) { return 2.0 * w * std::conj(w); },
                    [](cplx w) { return w * w; }, [](cplx w) { return 2.0 * w; }};
  const TestField one{[](cplx) { return cplx(1); }, [](cplx) { return cplx(0); }, [](cplx) { return cplx(0); },
                      [](cplx) { return cplx(0); }};
  EXPECT_LT(green_riemann_residual(f, one, d).residual(), 1e-6);
  // g = z̄: the area side is −2i∫2|z|² dA = −2πi, so the identity is not 0 = 0
  const auto gr = green_riemann_residual(f, zb, d);
  EXPECT_LT(gr.residual(), 1e-6);
  EXPECT_NEAR(std::abs(gr.area_side - cplx(0, -2 * pi)), 0.0, 1e-10);
}

TEST(GreenRiemann, ConvergesUnderRefinementOnDiskAndEllipse) {
  std::mt19937 rng(9);
  std::normal_distribution<double> n;
  const TestField f = exponential(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
  const TestField g = exponential(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
  for (int shape = 0; shape < 2; ++shape) {
    std::vector<double> r;
    for (int nb : {8, 16, 32}) {
      const auto d = shape == 0 ? PlaneDomain::disk(1.0, nb, 16) : ellipse(1.2, 0.7, nb);
      r.push_back(green_riemann_residual(f, g, d).residual());
    }
    EXPECT_GE(std::log2(r[0] / r[1]), 1.5);
    EXPECT_LT(r[2], 1e-8);
  }
}

TEST(LayerPotentials, JumpAcrossBoundaryEqualsDensity) {
  // the single layer is continuous; the Cauchy part equals −C[ψe^{λ(z−ξ)}], so outside − inside → ψ
  // ψ from the Gaussian trace, resampled to a fine boundary so that ±δ stays well resolved
  const auto coarse = PlaneDomain::disk(1.0, 64, 32);
  const auto dtn = dtn_operators(gaussian(), coarse);
  const cplx l(1.0, 0.5);
  const auto t = solve_psi_boundary(dtn, l);
  const int nf = 1024;
  const Eigen::MatrixXd up = trig_resample(64, nf);
  const Eigen::VectorXcd psi = up.cast<cplx>() * t.psi;
  const Eigen::VectorXcd dbar = up.cast<cplx>() * (dtn.phi * t.psi);
  const auto fine = PlaneDomain::disk(1.0, nf, 16);
  const auto& nodes = fine.boundary();
  for (int k = 0; k < 8; ++k) {
    const int idx = k * nf / 8 + 5;
    const cplx z0 = nodes[idx].point, nrm = nodes[idx].normal;
    auto jump = [&](double delta) {
      const auto in = layer_potentials(nodes, psi, dbar, l, z0 - delta * nrm);
      const auto out = layer_potentials(nodes, psi, dbar, l, z0 + delta * nrm);
      return (out.single + out.cauchy) - (in.single + in.cauchy);
    };
    const cplx extrapolated = 2.0 * jump(0.02) - jump(0.04);
    EXPECT_LT(std::abs(extrapolated - psi[idx]), 0.05 * std::abs(psi[idx]));
  }
}

TEST(LayerPotentials, HarmonicExtensionIdentity) {
  // for ψ0 harmonic in X and z outside, (i/2)∮ G ∂̄ψ0 + ψ0 ∂G = 0
  const auto d = PlaneDomain::disk(1.0, 128, 16);
  const auto phi0 = phi0_matrix(128, 1.0);
  Eigen::VectorXcd psi0(128);
  for (int k = 0; k < 128; ++k) {
    const cplx z = d.boundary()[k].point;
    psi0[k] = z * z + std::pow(std::conj(z), 3) + 1.0;
  }
  const Eigen::VectorXcd dbar = phi0 * psi0;
  for (cplx z : {cplx(1.6, 0.0), cplx(-1.2, 1.3), cplx(0.0, -3.0)}) {
    const auto v = layer_potentials(d.boundary(), psi0, dbar, cplx(0.9, -0.4), z);
    EXPECT_LT(std::abs(v.single + v.cauchy), 1e-8);
  }
}
