// dbar: command-line front end for the reconstruction pipeline.
//
// Exit codes: 0 success, 1 selftest failure or unexpected error, 2 invalid input or config,
// 3 numerical failure (non-convergence, ill-conditioning, zero sets).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dbar/io.hpp"
#include "dbar/pipeline.hpp"
#include "dbar/selftest.hpp"

using namespace dbar;
using json = nlohmann::json;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> jobs, grid, boundary_nodes;
  std::optional<double> lambda_radius, noise;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "RunConfig JSON file (defaults apply to missing keys)");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--jobs", o.jobs, "worker threads");
  app->add_option("--lambda-radius", o.lambda_radius, "radius of the λ-grid");
  app->add_option("--grid", o.grid, "interior grid nodes per side");
  app->add_option("--boundary-nodes", o.boundary_nodes, "boundary nodes N_b");
  app->add_option("--noise", o.noise, "relative noise level added to the DtN map");
  app->add_option("--seed", o.seed, "random seed (noise)");
}

RunConfig make_config(const Overrides& o, std::optional<std::vector<std::string>> stages = std::nullopt) {
  json j = o.config.empty() ? json::object() : io::read_json(o.config);
  if (o.out) j["out"] = *o.out;
  if (o.jobs) j["jobs"] = *o.jobs;
  if (o.grid) j["domain"]["grid"] = *o.grid;
  if (o.boundary_nodes) j["domain"]["boundary_nodes"] = *o.boundary_nodes;
  if (o.noise) j["noise"]["level"] = *o.noise;
  if (o.seed) {
    j["seed"] = *o.seed;
    j["noise"]["seed"] = *o.seed;
  }
  if (o.lambda_radius) {
    const RunConfig base = RunConfig::from_json(j);
    j["lambda_grid"] = base.lambda_grid;
    j["lambda_grid"]["radius"] = *o.lambda_radius;
  }
  if (stages) j["stages"] = *stages;
  RunConfig c = RunConfig::from_json(j);
  c.validate();
  return c;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"D-bar reconstruction of planar conductivities from boundary data"};
  app.require_subcommand(1);
  Overrides o;
  int code = 0;

  auto* curve = app.add_subcommand("validate-curve", "check an algebraic curve for the embedding conditions");
  std::string poly_file, poly_text;
  std::optional<double> r0;
  auto* file_opt = curve->add_option("file", poly_file, "polynomial file: lines 'i j re im' for c·z1^i z2^j");
  curve->add_option("--poly", poly_text, "polynomial text in the same format ('\\n' or ';' between terms)")
      ->excludes(file_opt);
  curve->add_option("--r0", r0, "radius of the domination checks (default: chosen from the curve)");
  curve->add_option("--out", o.out, "also write the report to this JSON file");
  curve->callback([&] {
    std::string text = poly_text;
    if (!poly_file.empty()) {
      std::ifstream in(poly_file);
      if (!in) throw InputError("cannot read " + poly_file);
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    for (char& ch : text)
      if (ch == ';') ch = '\n';
    if (text.empty()) throw InputError("validate-curve: give a file or --poly");
    const json r = geometry::validate_embedding(geometry::AlgebraicCurve(geometry::Polynomial::parse(text)), r0).to_json();
    if (o.out) io::write_json(*o.out, r);
    print(r);
  });

  auto* phantom = app.add_subcommand("phantom", "sample the configured phantom on the interior grid");
  add_common(phantom, o);
  phantom->callback([&] {
    const RunConfig c = make_config(o, std::vector<std::string>{"forward"});
    const auto sigma = c.make_phantom();
    const Grid2D& g = c.make_domain().grid();
    const RealField f = g.sample([&](cplx z) { return sigma(z); });
    const auto dir = std::filesystem::path(c.out) / "phantom";
    io::save_field(dir / "sigma", f, g, {{"phantom", sigma.name()}, {"params", sigma.params()}});
    io::write_csv_slice(dir / "sigma_slice.csv", f, g);
    print({{"phantom", sigma.name()}, {"min", f.minCoeff()}, {"max", f.maxCoeff()}, {"out", dir.string()}});
  });

  for (const std::string& stage : stage_names) {
    auto* sub = app.add_subcommand(stage, stage == "forward" ? "compute the DtN maps of the configured phantom"
                                                             : "run the " + stage + " stage on the stored " +
                                                                   stage_input(stage) + " output");
    add_common(sub, o);
    sub->callback([&, stage] {
      const RunConfig c = make_config(o, std::vector<std::string>{stage});
      print(run_stage(c, stage));
    });
  }

  auto* pipe = app.add_subcommand("pipeline", "run the configured stages and write manifest.json");
  add_common(pipe, o);
  pipe->callback([&] {
    const json m = run_pipeline(make_config(o));
    print({{"status", m.at("status")}, {"config_hash", m.at("config_hash")}, {"metrics", m.value("metrics", json::object())}});
  });

  auto* self = app.add_subcommand("selftest", "check pipeline invariants; prints one JSON report");
  std::string mode = "quick";
  int self_jobs = 1;
  self->add_option("--mode", mode, "quick | full")->check(CLI::IsMember({"quick", "full"}));
  self->add_option("--jobs", self_jobs, "worker threads");
  self->callback([&] {
    const auto r = run_selftest(mode, self_jobs);
    print(r.to_json());
    if (!r.passed()) code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return code;
}
