#include <gtest/gtest.h>

#include <fstream>

#include "dbar/io.hpp"
#include "dbar/reconstruct.hpp"

using namespace dbar;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dbar_io_" + name);
  fs::remove_all(p);
  return p;
}

ConductivityField gaussian() {
  return make_phantom("gaussian", {{"amp", 0.5}, {"center", {0.1, -0.05}}, {"width", 0.3}});
}

}  // namespace

TEST(Io, ArraysRoundTripBitExactly) {
  const auto dir = scratch("arrays");
  const std::vector<double> r{1.0, -0.0, 1e-300, std::nextafter(1.0, 2.0), 3.5, 7.0};
  const std::vector<cplx> c{{1, 2}, {-3, 0.25}, {0, -1e-17}};
  io::write_array(dir / "r", r, {2, 3}, {{"note", "x"}});
  io::write_array(dir / "c", c, {3});
  const auto rr = io::read_real(dir / "r");
  const auto cc = io::read_complex(dir / "c");
  EXPECT_EQ(rr.data, r);
  EXPECT_EQ(cc.data, c);
  EXPECT_EQ(rr.shape, (std::vector<std::int64_t>{2, 3}));
  EXPECT_EQ(rr.meta.at("note"), "x");
  EXPECT_EQ(rr.meta.at("convention"), io::convention_tag);
  EXPECT_EQ(fs::file_size(dir / "r.bin"), 6 * sizeof(double));
}

TEST(Io, MismatchesAreInputErrors) {
  const auto dir = scratch("bad");
  EXPECT_THROW(io::write_array(dir / "r", std::vector<double>(5), {2, 3}), InputError);
  io::write_array(dir / "r", std::vector<double>(6), {2, 3});
  EXPECT_THROW(io::read_complex(dir / "r"), InputError);
  fs::resize_file(dir / "r.bin", 8);
  EXPECT_THROW(io::read_real(dir / "r"), InputError);
  EXPECT_THROW(io::read_real(dir / "missing"), InputError);
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_THROW(io::read_json(dir / "broken.json"), InputError);
}

TEST(Io, FieldAndCsvSlice) {
  const auto dir = scratch("field");
  const Grid2D g(10, 1.1, cplx(0.2, -0.1));
  const RealField f = g.sample([](cplx z) { return z.real() + 10 * z.imag(); });
  io::save_field(dir / "sigma", f, g);
  Grid2D back;
  const RealField h = io::load_field(dir / "sigma", &back);
  EXPECT_TRUE((h == f).all());
  EXPECT_EQ(back.n, g.n);
  EXPECT_EQ(back.center, g.center);
  io::write_csv_slice(dir / "slice.csv", f, g);
  std::ifstream in(dir / "slice.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, g.n + 1);
}

TEST(Io, DtnTracesScatteringAndMuStack) {
  const auto dir = scratch("stages");
  const auto dtn = dtn_operators(gaussian(), geometry::PlaneDomain::disk(1.0, 32, 16));
  io::save_dtn(dir, dtn);
  const auto d = io::load_dtn(dir);
  EXPECT_TRUE(d.phi == dtn.phi);
  EXPECT_TRUE(d.phi0 == dtn.phi0);
  EXPECT_TRUE(d.lambda_diff == dtn.lambda_diff);
  EXPECT_EQ(d.nodes[5].point, dtn.nodes[5].point);
  EXPECT_EQ(d.metadata, dtn.metadata);

  const auto t = solve_psi_boundary(d, cplx(1.0, 0.5));
  io::save_traces(dir, {t});
  const auto ts = io::load_traces(dir, d.nodes);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_TRUE(ts[0].psi == t.psi);
  EXPECT_EQ(ts[0].lambda, t.lambda);
  EXPECT_EQ(ts[0].z_star, t.z_star);
  EXPECT_THROW(io::load_traces(dir, {}), InputError);

  for (const auto& grid : {LambdaGrid::cartesian(8, 2.0), LambdaGrid::polar(3, 6, 2.0),
                           LambdaGrid::from_nodes({{1, 1}, {1, -1}, {2, 0}}, {0.5, 0.5, 1.0})}) {
    auto s = synthetic_scattering(grid, [](cplx l) { return 0.1 * std::conj(l) / (1.0 + std::norm(l)); });
    s.flags[0] = ScatteringData::exceptional;
    io::save_scattering(dir, s);
    const auto back = io::load_scattering(dir);
    EXPECT_EQ(back.b, s.b);
    EXPECT_EQ(back.flags, s.flags);
    EXPECT_EQ(back.grid.nodes, s.grid.nodes);
    EXPECT_EQ(back.grid.weights, s.grid.weights);
    EXPECT_EQ(back.provenance, "file");
    EXPECT_EQ(back.diagnostics.at("source_provenance"), s.provenance);
  }

  const Grid2D g(8, 1.1);
  const auto mu = solve_mu_sweep(potential_q(gaussian(), g), {1.0, cplx(0, 2)});
  io::save_mu_stack(dir, mu);
  const auto m = io::load_mu_stack(dir);
  ASSERT_EQ(m.slices.size(), 2u);
  EXPECT_TRUE((m.slices[1].mu == mu.slices[1].mu).all());
  EXPECT_EQ(m.lambdas, mu.lambdas);
}

TEST(LambdaGridList, ConjugationClosureIsRequired) {
  const auto g = LambdaGrid::from_nodes({{1, 2}, {0.5, 0}, {1, -2}}, {1, 1, 1});
  EXPECT_EQ(g.conjugate_index(0), 2);
  EXPECT_EQ(g.conjugate_index(1), 1);
  EXPECT_DOUBLE_EQ(g.radius, std::sqrt(5.0));
  EXPECT_THROW(LambdaGrid::from_nodes({{1, 2}}, {1}), InputError);
  EXPECT_THROW(LambdaGrid::from_nodes({{1, 0}}, {1, 2}), InputError);
  EXPECT_THROW(io::lambda_grid_from_json({{"kind", "hexagonal"}}), InputError);
}
