#include "dbar/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "dbar/io.hpp"

namespace dbar {

std::string stage_input(const std::string& stage) {
  const auto it = std::find(stage_names.begin(), stage_names.end(), stage);
  if (it == stage_names.end()) throw InputError("unknown stage '" + stage + "'");
  if (stage == "forward") return "";
  // boundary-psi is a side branch: scatter reads dtn, not the probe traces
  if (stage == "scatter") return "dtn";
  return *(it - 1);
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

using json = nlohmann::json;

// Reads keys from one JSON object, rejecting keys it was not asked about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InputError("config: '" + path_ + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw InputError("config: unknown key '" + key(k) + "'");
  }

  template <class T>
  void get(const char* k, T& out) {
    seen_.insert(k);
    if (!j_.contains(k)) return;
    try {
      out = j_.at(k).get<T>();
    } catch (const json::exception& e) {
      throw InputError("config: '" + key(k) + "': " + e.what());
    }
  }
  void get_raw(const char* k, json& out) {
    seen_.insert(k);
    if (j_.contains(k)) out = j_.at(k);
  }
  void get_lambdas(const char* k, std::vector<cplx>& out) {
    json raw;
    get_raw(k, raw);
    if (raw.is_null()) return;
    out = parse_lambdas(raw, key(k));
  }
  bool has(const char* k) const { return j_.contains(k); }
  Section sub(const char* k) {
    seen_.insert(k);
    return Section(j_.contains(k) ? j_.at(k) : empty(), key(k));
  }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  static std::vector<cplx> parse_lambdas(const json& raw, const std::string& where) {
    if (!raw.is_array()) throw InputError("config: '" + where + "' must be a list");
    std::vector<cplx> out;
    for (const auto& p : raw) {
      if (p.is_number())
        out.emplace_back(p.get<double>(), 0.0);
      else if (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number())
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
      else
        throw InputError("config: '" + where + "' entries must be numbers or [re, im]");
    }
    return out;
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json lambdas_json(const std::vector<cplx>& ls) {
  json a = json::array();
  for (cplx l : ls) a.push_back({l.real(), l.imag()});
  return a;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("config: " + what);
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  Section top(j, "");
  {
    auto s = top.sub("domain");
    s.get("shape", c.domain.shape);
    s.get("radius", c.domain.radius);
    s.get("grid", c.domain.grid);
    s.get("boundary_nodes", c.domain.boundary_nodes);
  }
  {
    auto s = top.sub("phantom");
    s.get("name", c.phantom.name);
    // a phantom named without params uses its own preset defaults
    if (s.has("name") && !s.has("params")) c.phantom.params = json::object();
    s.get_raw("params", c.phantom.params);
  }
  {
    auto s = top.sub("forward");
    s.get("radial_degree", c.forward.radial_degree);
    s.get("angular", c.forward.angular);
  }
  {
    auto s = top.sub("noise");
    s.get("level", c.noise.level);
    s.get("seed", c.noise.seed);
  }
  if (j.contains("lambda_grid")) {
    auto s = top.sub("lambda_grid");
    json g = {{"kind", "cartesian"}};
    for (const char* k : {"kind", "radius", "n", "angles", "nodes", "weights"}) {
      json v;
      s.get_raw(k, v);
      if (!v.is_null()) g[k] = v;
    }
    c.lambda_grid = g;
  }
  {
    auto s = top.sub("boundary");
    s.get("max_condition", c.boundary.max_condition);
    s.get_lambdas("probe_lambdas", c.boundary.probe_lambdas);
  }
  {
    auto s = top.sub("scatter");
    std::string m = c.scatter.method == DbarMethod::analytic ? "analytic" : "finite_difference";
    s.get("method", m);
    if (m == "analytic")
      c.scatter.method = DbarMethod::analytic;
    else if (m == "finite_difference")
      c.scatter.method = DbarMethod::finite_difference;
    else
      throw InputError("config: 'scatter.method' must be analytic or finite_difference");
    s.get("psi_threshold", c.scatter.psi_threshold);
  }
  {
    auto s = top.sub("dbar");
    s.get("z_grid", c.dbar.z_grid);
    s.get("tolerance", c.dbar.gmres.tolerance);
    s.get("max_iterations", c.dbar.gmres.max_iterations);
    s.get("restart", c.dbar.gmres.restart);
  }
  {
    auto s = top.sub("reconstruct");
    std::string f = to_string(c.reconstruct.formula);
    s.get("formula", f);
    c.reconstruct.formula = parse_formula(f);
    s.get_lambdas("lambdas", c.reconstruct.lambdas);
    s.get("psi_threshold", c.reconstruct.q.psi_threshold);
    s.get("mu_threshold", c.reconstruct.q.mu_threshold);
    s.get("min_coverage", c.reconstruct.q.min_coverage);
    auto sg = s.sub("sigma");
    sg.get("radial_degree", c.reconstruct.sigma.radial_degree);
    sg.get("angular", c.reconstruct.sigma.angular);
  }
  top.get("stages", c.stages);
  top.get("out", c.out);
  top.get("jobs", c.jobs);
  top.get("seed", c.seed);
  return c;
}

RunConfig RunConfig::load(const std::string& path) { return from_json(io::read_json(path)); }

json RunConfig::to_json() const {
  return {
      {"domain",
       {{"shape", domain.shape}, {"radius", domain.radius}, {"grid", domain.grid},
        {"boundary_nodes", domain.boundary_nodes}}},
      {"phantom", {{"name", phantom.name}, {"params", phantom.params}}},
      {"forward", {{"radial_degree", forward.radial_degree}, {"angular", forward.angular}}},
      {"noise", {{"level", noise.level}, {"seed", noise.seed}}},
      {"lambda_grid", lambda_grid},
      {"boundary", {{"max_condition", boundary.max_condition}, {"probe_lambdas", lambdas_json(boundary.probe_lambdas)}}},
      {"scatter",
       {{"method", scatter.method == DbarMethod::analytic ? "analytic" : "finite_difference"},
        {"psi_threshold", scatter.psi_threshold}}},
      {"dbar",
       {{"z_grid", dbar.z_grid}, {"tolerance", dbar.gmres.tolerance}, {"max_iterations", dbar.gmres.max_iterations},
        {"restart", dbar.gmres.restart}}},
      {"reconstruct",
       {{"formula", to_string(reconstruct.formula)},
        {"lambdas", lambdas_json(reconstruct.lambdas)},
        {"psi_threshold", reconstruct.q.psi_threshold},
        {"mu_threshold", reconstruct.q.mu_threshold},
        {"min_coverage", reconstruct.q.min_coverage},
        {"sigma", {{"radial_degree", reconstruct.sigma.radial_degree}, {"angular", reconstruct.sigma.angular}}}}},
      {"stages", stages},
      {"out", out},
      {"jobs", jobs},
      {"seed", seed},
  };
}

std::string RunConfig::hash() const {
  // the output directory and thread count do not change results
  json j = to_json();
  j.erase("out");
  j.erase("jobs");
  return fnv1a_hex(j.dump());
}

void RunConfig::validate() const {
  require(domain.shape == "disk", "'domain.shape' must be disk (the forward solver handles circles only)");
  require(domain.radius > 0.0, "'domain.radius' must be positive");
  require(domain.grid >= 16, "'domain.grid' must be at least 16");
  require(domain.boundary_nodes >= 8 && domain.boundary_nodes % 2 == 0, "'domain.boundary_nodes' must be even and ≥ 8");
  require(forward.radial_degree >= 4 && forward.angular >= 8, "'forward' resolution too small");
  require(noise.level >= 0.0, "'noise.level' must be nonnegative");
  require(boundary.max_condition > 1.0, "'boundary.max_condition' must exceed 1");
  require(!boundary.probe_lambdas.empty(), "'boundary.probe_lambdas' must not be empty");
  for (cplx l : boundary.probe_lambdas) require(l != cplx(0.0), "'boundary.probe_lambdas' must not contain 0");
  require(scatter.psi_threshold > 0.0, "'scatter.psi_threshold' must be positive");
  require(dbar.z_grid >= 8, "'dbar.z_grid' must be at least 8");
  require(dbar.gmres.tolerance > 0.0 && dbar.gmres.tolerance < 1.0, "'dbar.tolerance' must lie in (0, 1)");
  require(dbar.gmres.max_iterations > 0 && dbar.gmres.restart > 0, "'dbar' iteration limits must be positive");
  require(!reconstruct.lambdas.empty(), "'reconstruct.lambdas' must not be empty");
  require(reconstruct.q.psi_threshold > 0.0 && reconstruct.q.mu_threshold > 0.0, "reconstruct thresholds must be positive");
  require(reconstruct.q.min_coverage > 0.0 && reconstruct.q.min_coverage <= 1.0, "'reconstruct.min_coverage' must lie in (0, 1]");
  require(reconstruct.sigma.radial_degree >= 4 && reconstruct.sigma.angular >= 8, "'reconstruct.sigma' resolution too small");
  require(jobs >= 1, "'jobs' must be at least 1");
  require(!out.empty(), "'out' must not be empty");
  require(!stages.empty(), "'stages' must not be empty");

  // stages: known, unique, in pipeline order
  int prev = -1;
  for (const auto& s : stages) {
    const auto it = std::find(stage_names.begin(), stage_names.end(), s);
    require(it != stage_names.end(), "unknown stage '" + s + "'");
    const int idx = int(it - stage_names.begin());
    require(idx > prev, "'stages' must be unique and in pipeline order");
    prev = idx;
  }
  auto wants = [&](const char* s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };

  make_phantom();
  const LambdaGrid g = make_lambda_grid();  // closure under conjugation is checked here
  require(g.size() > 0, "'lambda_grid' has no nodes");
  if (wants("dbar")) require(g.kind == LambdaGrid::Kind::cartesian, "the dbar stage needs a cartesian 'lambda_grid'");

  // the λ-set must be one the chosen formula accepts
  if (wants("reconstruct")) {
    const Grid2D probe(8, 1.1);
    FaddeevField f;
    for (cplx l : reconstruct.lambdas) {
      FaddeevSlice s;
      s.lambda = l;
      s.grid = probe;
      s.mu = ComplexField::Ones(probe.n, probe.n);
      f.lambdas.push_back(l);
      f.slices.push_back(std::move(s));
    }
    QOptions q = reconstruct.q;
    q.min_coverage = 0.0;
    try {
      q_from_psi(f, reconstruct.formula, q);
    } catch (const InputError& e) {
      throw InputError(std::string("config: 'reconstruct.lambdas': ") + e.what());
    }
  }
}

LambdaGrid RunConfig::make_lambda_grid() const {
  try {
    return io::lambda_grid_from_json(lambda_grid);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: 'lambda_grid': ") + e.what());
  } catch (const InputError& e) {
    throw InputError(std::string("config: 'lambda_grid': ") + e.what());
  }
}

geometry::PlaneDomain RunConfig::make_domain() const {
  return geometry::PlaneDomain::disk(domain.radius, domain.boundary_nodes, domain.grid);
}

ConductivityField RunConfig::make_phantom() const {
  try {
    return dbar::make_phantom(phantom.name, phantom.params, domain.radius);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: 'phantom.params': ") + e.what());
  }
}

Grid2D RunConfig::z_grid() const { return Grid2D(dbar.z_grid, 1.1 * domain.radius); }

}  // namespace dbar
