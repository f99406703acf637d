#include "dbar/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "dbar/io.hpp"

namespace dbar {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path stage_dir(const RunConfig& cfg, const std::string& stage) { return fs::path(cfg.out) / stage; }

// Marks a completed stage; the next stage checks for it before reading.
void finish_stage(const RunConfig& cfg, const std::string& stage, const json& diag) {
  io::write_json(stage_dir(cfg, stage) / "stage.json",
                 {{"stage", stage}, {"config_hash", cfg.hash()}, {"diagnostics", diag}});
}

void require_input(const RunConfig& cfg, const std::string& stage) {
  const std::string in = stage_input(stage);
  if (in.empty()) return;
  if (!fs::exists(stage_dir(cfg, in) / "stage.json"))
    throw InputError("stage '" + stage + "' needs the output of '" + in + "' in " + stage_dir(cfg, in).string());
}

json run_forward(const RunConfig& cfg) {
  const auto sigma = cfg.make_phantom();
  const auto domain = cfg.make_domain();
  const DtNData dtn = dtn_operators(sigma, domain, cfg.forward);
  const fs::path dir = stage_dir(cfg, "forward");
  io::save_dtn(dir, dtn);
  const Grid2D& g = domain.grid();
  io::save_field(dir / "sigma_true", g.sample([&](cplx z) { return sigma(z); }), g, {{"phantom", sigma.name()}});
  const Eigen::MatrixXd& l = dtn.lambda_diff;
  return {{"boundary_nodes", dtn.size()},
          {"max_lambda_diff", l.cwiseAbs().maxCoeff()},
          {"lambda_diff_asymmetry", (l - l.transpose()).cwiseAbs().maxCoeff() / std::max(1e-300, l.cwiseAbs().maxCoeff())},
          {"metadata", dtn.metadata}};
}

json run_dtn(const RunConfig& cfg) {
  DtNData dtn = io::load_dtn(stage_dir(cfg, "forward"));
  if (cfg.noise.level > 0.0) add_noise(dtn, cfg.noise.level, cfg.noise.seed);
  io::save_dtn(stage_dir(cfg, "dtn"), dtn);
  return {{"noise", {{"level", cfg.noise.level}, {"seed", cfg.noise.seed}}},
          {"max_phi_minus_phi0", (dtn.phi - dtn.phi0).cwiseAbs().maxCoeff()},
          {"singularity_profile", singularity_profile(dtn).to_json()}};
}

json run_boundary(const RunConfig& cfg) {
  const DtNData dtn = io::load_dtn(stage_dir(cfg, "dtn"));
  std::vector<BoundaryTrace> traces;
  json meta = json::array();
  double worst_residual = 0.0, worst_condition = 0.0;
  for (cplx l : cfg.boundary.probe_lambdas) {
    traces.push_back(solve_psi_boundary(dtn, l, {cfg.boundary.max_condition}));
    meta.push_back(traces.back().metadata());
    worst_residual = std::max(worst_residual, traces.back().residual);
    worst_condition = std::max(worst_condition, traces.back().condition);
  }
  io::save_traces(stage_dir(cfg, "boundary-psi"), traces);
  return {{"traces", meta}, {"max_residual", worst_residual}, {"max_condition", worst_condition}};
}

json run_scatter(const RunConfig& cfg) {
  const DtNData dtn = io::load_dtn(stage_dir(cfg, "dtn"));
  ScatteringOptions opt;
  opt.method = cfg.scatter.method;
  opt.psi_threshold = cfg.scatter.psi_threshold;
  opt.jobs = cfg.jobs;
  const ScatteringData s = b_from_dbar_lambda(dtn, cfg.make_lambda_grid(), opt);
  io::save_scattering(stage_dir(cfg, "scatter"), s);
  int flagged = 0;
  for (auto f : s.flags) flagged += f != ScatteringData::ok;
  json d = s.diagnostics;
  d["nodes"] = s.size();
  d["flagged"] = flagged;
  return d;
}

json run_dbar(const RunConfig& cfg) {
  const ScatteringData s = io::load_scattering(stage_dir(cfg, "scatter"));
  const DbarSolver solver(s, cfg.dbar.gmres);
  const Grid2D g = cfg.z_grid();
  const FaddeevField f = faddeev_field_from_dbar(solver, g, cfg.reconstruct.lambdas, cfg.jobs);
  io::save_mu_stack(stage_dir(cfg, "dbar"), f);
  double dev = 0.0;
  for (const auto& sl : f.slices) dev = std::max(dev, (sl.mu - cplx(1.0)).abs().maxCoeff());
  return {{"z_grid", io::grid_to_json(g)},
          {"lambdas", f.lambdas.size()},
          {"max_iterations", f.slices.front().iterations},
          {"max_residual", f.slices.front().residual},
          {"max_abs_mu_minus_one", dev}};
}

json run_reconstruct(const RunConfig& cfg) {
  const FaddeevField f = io::load_mu_stack(stage_dir(cfg, "dbar"));
  const Grid2D& zg = f.slices.front().grid;
  QOptions qo = cfg.reconstruct.q;
  qo.region_radius = cfg.domain.radius;
  const QReconstruction q = q_from_psi(f, cfg.reconstruct.formula, qo);
  const SigmaReconstruction s = sigma_from_q(q.q, zg, cfg.domain.radius, cfg.reconstruct.sigma);
  const Grid2D g = cfg.make_domain().grid();
  const RealField sigma = resample(s.sigma, zg, g);

  const fs::path dir = stage_dir(cfg, "reconstruct");
  io::save_field(dir / "q", q.q, zg, {{"formula", to_string(q.formula)}});
  io::save_field(dir / "sigma", sigma, g, {{"formula", to_string(q.formula)}});
  io::write_csv_slice(dir / "sigma_slice.csv", sigma, g);
  json d = {{"formula", to_string(q.formula)},
            {"coverage", q.coverage},
            {"imaginary_ratio", q.imaginary_ratio},
            {"extrapolation_spread", q.extrapolation_spread},
            {"w_min", s.w_min}};
  if (q.warning) d["warning"] = *q.warning;

  // cross-check: σ = μ(z, 0)² when λ = 0 was solved
  for (const auto& sl : f.slices) {
    if (sl.lambda != cplx(0.0)) continue;
    RealField direct = sl.mu.square().real();
    for (int j = 0; j < zg.n; ++j)
      for (int i = 0; i < zg.n; ++i)
        if (std::abs(zg.point(i, j)) >= cfg.domain.radius) direct(i, j) = 1.0;
    io::save_field(dir / "sigma_direct", resample(direct, zg, g), g, {{"route", "mu(z,0)^2"}});
    d["direct_route"] = true;
  }
  return d;
}

double now() { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); }

}  // namespace

json run_stage(const RunConfig& cfg, const std::string& stage) {
  require_input(cfg, stage);
  fs::remove_all(stage_dir(cfg, stage));
  json d;
  if (stage == "forward")
    d = run_forward(cfg);
  else if (stage == "dtn")
    d = run_dtn(cfg);
  else if (stage == "boundary-psi")
    d = run_boundary(cfg);
  else if (stage == "scatter")
    d = run_scatter(cfg);
  else if (stage == "dbar")
    d = run_dbar(cfg);
  else if (stage == "reconstruct")
    d = run_reconstruct(cfg);
  else
    throw InputError("unknown stage '" + stage + "'");
  finish_stage(cfg, stage, d);
  return d;
}

json reconstruction_metrics(const RunConfig& cfg) {
  const fs::path truth_file = stage_dir(cfg, "forward") / "sigma_true";
  if (!fs::exists(fs::path(truth_file).concat(".json"))) return json::object();
  Grid2D g;
  const RealField truth = io::load_field(truth_file, &g);
  std::optional<cplx> center;
  if (cfg.phantom.name == "gaussian") {
    const auto c = cfg.phantom.params.value("center", std::vector<double>{0.0, 0.0});
    center = cplx(c.at(0), c.at(1));
  }
  json m;
  m["sigma"] = error_metrics(io::load_field(stage_dir(cfg, "reconstruct") / "sigma"), truth, g, cfg.domain.radius, center)
                   .to_json();
  const fs::path direct = stage_dir(cfg, "reconstruct") / "sigma_direct";
  if (fs::exists(fs::path(direct).concat(".json")))
    m["sigma_direct"] = error_metrics(io::load_field(direct), truth, g, cfg.domain.radius, center).to_json();
  return m;
}

json run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  // inputs not produced by this run must already be on disk
  for (const auto& s : cfg.stages) {
    const std::string in = stage_input(s);
    const bool produced = std::find(cfg.stages.begin(), cfg.stages.end(), in) != cfg.stages.end();
    if (!in.empty() && !produced) require_input(cfg, s);
  }

  json manifest = {{"version", manifest_version},
                   {"config_hash", cfg.hash()},
                   {"config", cfg.to_json()},
                   {"status", "running"},
                   {"stages", json::array()}};
  const fs::path path = fs::path(cfg.out) / "manifest.json";
  io::write_json(path, manifest);
  for (const auto& s : cfg.stages) {
    const double t0 = now();
    try {
      json d = run_stage(cfg, s);
      manifest["stages"].push_back({{"name", s}, {"status", "ok"}, {"wall_seconds", now() - t0}, {"diagnostics", d}});
    } catch (const std::exception& e) {
      manifest["stages"].push_back({{"name", s}, {"status", "error"}, {"wall_seconds", now() - t0}, {"error", e.what()}});
      manifest["status"] = "error";
      manifest["error"] = e.what();
      io::write_json(path, manifest);
      throw;
    }
    io::write_json(path, manifest);
  }
  if (std::find(cfg.stages.begin(), cfg.stages.end(), "reconstruct") != cfg.stages.end()) {
    manifest["metrics"] = reconstruction_metrics(cfg);
    io::write_json(fs::path(cfg.out) / "metrics.json", manifest["metrics"]);
  }
  manifest["status"] = "ok";
  io::write_json(path, manifest);
  return manifest;
}

}  // namespace dbar
