#include <gtest/gtest.h>

#include <fstream>
#include <iterator>

#include "dbar/io.hpp"
#include "dbar/pipeline.hpp"
#include "dbar/selftest.hpp"

using namespace dbar;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// small enough for a unit test; the reconstruction is coarse but every stage runs
json small(const std::string& out) {
  return {{"domain", {{"grid", 32}, {"boundary_nodes", 32}}},
          {"forward", {{"radial_degree", 31}, {"angular", 32}}},
          {"lambda_grid", {{"kind", "cartesian"}, {"radius", 2.0}, {"n", 8}}},
          {"dbar", {{"z_grid", 16}}},
          {"reconstruct", {{"sigma", {{"radial_degree", 21}, {"angular", 32}}}}},
          {"out", out}};
}

std::string bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dbar_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(RunConfig, DefaultsRoundTripAndHash) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  const RunConfig d = RunConfig::from_json(c.to_json());
  EXPECT_EQ(d.to_json(), c.to_json());
  EXPECT_EQ(d.hash(), c.hash());
  EXPECT_EQ(c.hash().size(), 16u);
  RunConfig e = c;
  e.out = "elsewhere";
  e.jobs = 4;
  EXPECT_EQ(e.hash(), c.hash());
  e.noise.level = 0.01;
  EXPECT_NE(e.hash(), c.hash());
  // FNV-1a 64 reference values
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(RunConfig, PartialDocumentsKeepDefaults) {
  const auto c = RunConfig::from_json({{"dbar", {{"z_grid", 24}}}, {"boundary", {{"probe_lambdas", {1.0, {0.0, 2.0}}}}}});
  EXPECT_EQ(c.dbar.z_grid, 24);
  EXPECT_EQ(c.dbar.gmres.tolerance, RunConfig{}.dbar.gmres.tolerance);
  EXPECT_EQ(c.boundary.probe_lambdas, (std::vector<cplx>{1.0, {0.0, 2.0}}));
  EXPECT_EQ(c.domain.boundary_nodes, 128);
  const auto p = RunConfig::from_json({{"phantom", {{"name", "annulus"}}}});
  EXPECT_TRUE(p.phantom.params.empty());
}

TEST(RunConfig, InvalidConfigsAreRejectedBeforeCompute) {
  const std::vector<json> bad = {
      {{"domian", {{"grid", 32}}}},
      {{"domain", {{"gird", 32}}}},
      {{"domain", {{"grid", "many"}}}},
      {{"dbar", {{"tolerance", -1.0}}}},
      {{"dbar", {{"tolerance", 0.0}}}},
      {{"noise", {{"level", -0.1}}}},
      {{"domain", {{"boundary_nodes", 31}}}},
      {{"domain", {{"shape", "ellipse"}}}},
      {{"lambda_grid", {{"kind", "list"}, {"nodes", {{1.0, 1.0}}}}}},
      {{"lambda_grid", {{"kind", "polar"}, {"n", 4}, {"angles", 8}, {"radius", 2.0}}}},
      {{"lambda_grid", {{"kind", "cartesian"}, {"n", 7}, {"radius", 2.0}}}},
      {{"stages", {"dbar", "scatter"}}},
      {{"stages", {"forward", "invert"}}},
      {{"scatter", {{"method", "guess"}}}},
      {{"reconstruct", {{"formula", "A"}, {"lambdas", {1.0, 2.0}}}}},
      {{"reconstruct", {{"formula", "C"}, {"lambdas", {0.5}}}}},
      {{"phantom", {{"name", "zebra"}}}},
      {{"boundary", {{"probe_lambdas", {0.0}}}}},
      {{"jobs", 0}},
  };
  for (const auto& j : bad) EXPECT_THROW(RunConfig::from_json(j).validate(), InputError) << j.dump();
  // a polar grid is fine when the dbar stage is not requested
  EXPECT_NO_THROW(RunConfig::from_json({{"lambda_grid", {{"kind", "polar"}, {"n", 4}, {"angles", 8}, {"radius", 2.0}}},
                                        {"stages", {"forward", "dtn", "scatter"}}})
                      .validate());
}

TEST(Pipeline, MissingInputsAreReportedBeforeAnyStageRuns) {
  const auto out = scratch("missing");
  auto j = small(out.string());
  j["stages"] = {"dbar", "reconstruct"};
  EXPECT_THROW(run_pipeline(RunConfig::from_json(j)), InputError);
  EXPECT_FALSE(fs::exists(out / "manifest.json"));
}

TEST(Pipeline, RunsEndToEndResumesFromFilesAndIsDeterministic) {
  const auto out = scratch("full");
  const RunConfig cfg = RunConfig::from_json(small(out.string()));
  const json m = run_pipeline(cfg);
  EXPECT_EQ(m.at("status"), "ok");
  EXPECT_EQ(m.at("version"), manifest_version);
  EXPECT_EQ(m.at("config_hash"), cfg.hash());
  ASSERT_EQ(m.at("stages").size(), stage_names.size());
  for (const auto& s : m.at("stages")) {
    EXPECT_EQ(s.at("status"), "ok");
    EXPECT_GE(s.at("wall_seconds").get<double>(), 0.0);
  }
  EXPECT_LT(m.at("stages")[2].at("diagnostics").at("max_residual").get<double>(), 1e-8);
  EXPECT_TRUE(m.at("metrics").contains("sigma"));
  EXPECT_TRUE(m.at("metrics").contains("sigma_direct"));
  EXPECT_EQ(io::read_json(out / "manifest.json"), m);
  const std::string sigma = bytes(out / "reconstruct" / "sigma.bin");
  ASSERT_FALSE(sigma.empty());

  // rerunning the tail from the stored scattering data reproduces the same bytes
  auto tail = cfg;
  tail.stages = {"dbar", "reconstruct"};
  tail.jobs = 2;
  run_pipeline(tail);
  EXPECT_EQ(bytes(out / "reconstruct" / "sigma.bin"), sigma);

  // a second full run into another directory as well
  const auto out2 = scratch("full2");
  auto again = cfg;
  again.out = out2.string();
  run_pipeline(again);
  EXPECT_EQ(bytes(out2 / "reconstruct" / "sigma.bin"), sigma);
  EXPECT_EQ(bytes(out2 / "scatter" / "scattering_b.bin"), bytes(out / "scatter" / "scattering_b.bin"));
}

TEST(Pipeline, NumericalFailureLeavesPartialManifest) {
  const auto out = scratch("partial");
  auto j = small(out.string());
  j["stages"] = {"forward", "dtn", "scatter", "dbar"};
  j["dbar"]["max_iterations"] = 1;
  j["dbar"]["restart"] = 1;
  j["dbar"]["tolerance"] = 1e-14;
  j["phantom"] = {{"name", "gaussian"}, {"params", {{"amp", 2.0}, {"width", 0.3}}}};
  EXPECT_THROW(run_pipeline(RunConfig::from_json(j)), NumericalError);
  const json m = io::read_json(out / "manifest.json");
  EXPECT_EQ(m.at("status"), "error");
  ASSERT_EQ(m.at("stages").size(), 4u);
  EXPECT_EQ(m.at("stages")[2].at("status"), "ok");
  EXPECT_EQ(m.at("stages")[3].at("status"), "error");
  EXPECT_FALSE(m.at("error").get<std::string>().empty());
}

TEST(Selftest, QuickPassesAndDetectsTheCanary) {
  const auto r = run_selftest("quick");
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.value << " " << c.detail;
  EXPECT_TRUE(r.canary_detected);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.to_json().at("checks").size(), r.checks.size());
  EXPECT_THROW(run_selftest("slow"), InputError);
}
