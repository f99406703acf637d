#include "dbar/io.hpp"

#include <bit>
#include <fstream>
#include <iomanip>

namespace dbar::io {

static_assert(std::endian::native == std::endian::little, "binary files are written in host order");

namespace {

std::int64_t count(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto s : shape) {
    if (s < 0) throw InputError("io: negative dimension");
    n *= s;
  }
  return n;
}

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

template <class T>
void write_raw(const fs::path& stem, const std::vector<T>& data, const std::vector<std::int64_t>& shape,
               nlohmann::json meta, const char* dtype) {
  if (count(shape) != std::int64_t(data.size())) throw InputError("io: shape does not match data for " + stem.string());
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  std::ofstream out(with_ext(stem, ".bin"), std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size() * sizeof(T)));
  if (!out) throw InputError("io: cannot write " + with_ext(stem, ".bin").string());
  meta["dtype"] = dtype;
  meta["shape"] = shape;
  if (!meta.contains("convention")) meta["convention"] = convention_tag;
  write_json(with_ext(stem, ".json"), meta);
}

template <class T>
void read_raw(const fs::path& stem, const char* dtype, std::vector<T>& data, std::vector<std::int64_t>& shape,
              nlohmann::json& meta) {
  meta = read_json(with_ext(stem, ".json"));
  if (meta.value("dtype", "") != dtype)
    throw InputError("io: " + stem.string() + " has dtype " + meta.value("dtype", "?") + ", expected " + dtype);
  shape = meta.at("shape").get<std::vector<std::int64_t>>();
  data.resize(count(shape));
  std::ifstream in(with_ext(stem, ".bin"), std::ios::binary);
  if (!in) throw InputError("io: missing " + with_ext(stem, ".bin").string());
  in.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size() * sizeof(T)));
  if (in.gcount() != std::streamsize(data.size() * sizeof(T)))
    throw InputError("io: " + with_ext(stem, ".bin").string() + " is shorter than its shape");
}

// Eigen fields are column-major with (i, j) ↔ (x, y); files store [y][x] row-major, which is the
// same byte order.
template <class Field, class T>
std::vector<T> field_data(const Field& f) {
  return std::vector<T>(f.data(), f.data() + f.size());
}

std::vector<cplx> matrix_rows(const Eigen::MatrixXcd& m) {
  std::vector<cplx> v;
  v.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
  return v;
}

Eigen::MatrixXcd matrix_from(const ComplexArray& a) {
  if (a.shape.size() != 2) throw InputError("io: expected a matrix");
  Eigen::MatrixXcd m(a.shape[0], a.shape[1]);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = a.data[r * m.cols() + c];
  return m;
}

}  // namespace

void write_array(const fs::path& stem, const std::vector<double>& data, const std::vector<std::int64_t>& shape,
                 nlohmann::json meta) {
  write_raw(stem, data, shape, std::move(meta), "float64");
}

void write_array(const fs::path& stem, const std::vector<cplx>& data, const std::vector<std::int64_t>& shape,
                 nlohmann::json meta) {
  write_raw(stem, data, shape, std::move(meta), "complex128");
}

RealArray read_real(const fs::path& stem) {
  RealArray a;
  read_raw(stem, "float64", a.data, a.shape, a.meta);
  return a;
}

ComplexArray read_complex(const fs::path& stem) {
  ComplexArray a;
  read_raw(stem, "complex128", a.data, a.shape, a.meta);
  return a;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << std::setw(2) << j << '\n';
  if (!out) throw InputError("io: cannot write " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("io: missing " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("io: " + path.string() + ": " + e.what());
  }
}

nlohmann::json grid_to_json(const Grid2D& g) {
  return {{"n", g.n}, {"half_width", g.half_width}, {"center", {g.center.real(), g.center.imag()}}};
}

Grid2D grid_from_json(const nlohmann::json& j) {
  const auto c = j.value("center", std::vector<double>{0.0, 0.0});
  return Grid2D(j.at("n").get<int>(), j.at("half_width").get<double>(), cplx(c.at(0), c.at(1)));
}

void save_field(const fs::path& stem, const RealField& f, const Grid2D& g, nlohmann::json meta) {
  meta["grid"] = grid_to_json(g);
  write_array(stem, field_data<RealField, double>(f), {g.n, g.n}, std::move(meta));
}

RealField load_field(const fs::path& stem, Grid2D* grid) {
  const RealArray a = read_real(stem);
  const Grid2D g = grid_from_json(a.meta.at("grid"));
  if (a.shape != std::vector<std::int64_t>{g.n, g.n}) throw InputError("io: field shape does not match its grid");
  if (grid) *grid = g;
  return Eigen::Map<const RealField>(a.data.data(), g.n, g.n);
}

void write_csv_slice(const fs::path& path, const RealField& f, const Grid2D& g) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "x,y,value\n" << std::setprecision(17);
  const int j = g.n / 2;
  for (int i = 0; i < g.n; ++i) {
    const cplx z = g.point(i, j);
    out << z.real() << ',' << z.imag() << ',' << f(i, j) << '\n';
  }
}

// ---------------------------------------------------------------------------

void save_dtn(const fs::path& dir, const DtNData& d) {
  const int n = d.size();
  std::vector<double> nodes;
  for (const auto& b : d.nodes)
    for (double v : {b.param, b.point.real(), b.point.imag(), b.normal.real(), b.normal.imag(), b.weight}) nodes.push_back(v);
  write_array(dir / "nodes", nodes, {n, 6}, {{"columns", {"param", "x", "y", "nx", "ny", "weight"}}});
  write_array(dir / "phi", matrix_rows(d.phi), {n, n});
  write_array(dir / "phi0", matrix_rows(d.phi0), {n, n});
  std::vector<double> ld;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) ld.push_back(d.lambda_diff(r, c));
  write_array(dir / "lambda_diff", ld, {n, n});
  write_json(dir / "dtn.json", {{"radius", d.radius}, {"metadata", d.metadata}});
}

DtNData load_dtn(const fs::path& dir) {
  DtNData d;
  const auto info = read_json(dir / "dtn.json");
  d.radius = info.at("radius").get<double>();
  d.metadata = info.value("metadata", nlohmann::json::object());
  const RealArray nodes = read_real(dir / "nodes");
  const int n = int(nodes.shape.at(0));
  for (int k = 0; k < n; ++k) {
    const double* r = &nodes.data[6 * k];
    d.nodes.push_back({r[0], cplx(r[1], r[2]), cplx(r[3], r[4]), r[5]});
  }
  d.phi = matrix_from(read_complex(dir / "phi"));
  d.phi0 = matrix_from(read_complex(dir / "phi0"));
  const RealArray ld = read_real(dir / "lambda_diff");
  d.lambda_diff.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) d.lambda_diff(r, c) = ld.data[r * n + c];
  if (d.phi.rows() != n || d.phi0.rows() != n) throw InputError("io: DtN matrices do not match the node count");
  return d;
}

void save_traces(const fs::path& dir, const std::vector<BoundaryTrace>& traces) {
  if (traces.empty()) throw InputError("io: no traces to save");
  const int n = traces[0].size();
  std::vector<cplx> psi;
  nlohmann::json meta = nlohmann::json::array();
  for (const auto& t : traces) {
    if (t.size() != n) throw InputError("io: traces with different node counts");
    psi.insert(psi.end(), t.psi.data(), t.psi.data() + n);
    meta.push_back(t.metadata());
  }
  write_array(dir / "psi_traces", psi, {std::int64_t(traces.size()), n}, {{"traces", meta}});
}

std::vector<BoundaryTrace> load_traces(const fs::path& dir, const std::vector<geometry::BoundaryNode>& nodes) {
  const ComplexArray a = read_complex(dir / "psi_traces");
  const auto& meta = a.meta.at("traces");
  std::vector<BoundaryTrace> out;
  const int n = int(a.shape.at(1));
  if (n != int(nodes.size())) throw InputError("io: traces do not match the boundary nodes");
  for (std::size_t k = 0; k < meta.size(); ++k) {
    BoundaryTrace t;
    const auto l = meta[k].at("lambda").get<std::vector<double>>();
    t.lambda = cplx(l[0], l[1]);
    t.nodes = nodes;
    t.psi = Eigen::Map<const Eigen::VectorXcd>(&a.data[k * n], n);
    t.condition = meta[k].at("condition").get<double>();
    t.residual = meta[k].at("residual").get<double>();
    t.z_star = meta[k].at("z_star").at("index").get<int>();
    t.coefficient_tail = meta[k].at("coefficient_tail").get<double>();
    out.push_back(std::move(t));
  }
  return out;
}

nlohmann::json lambda_grid_to_json(const LambdaGrid& g) {
  switch (g.kind) {
    case LambdaGrid::Kind::cartesian: return {{"kind", "cartesian"}, {"n", g.n}, {"radius", g.radius}};
    case LambdaGrid::Kind::polar: return {{"kind", "polar"}, {"n", g.n}, {"angles", g.angles}, {"radius", g.radius}};
    case LambdaGrid::Kind::list: break;
  }
  nlohmann::json nodes = nlohmann::json::array();
  for (cplx l : g.nodes) nodes.push_back({l.real(), l.imag()});
  return {{"kind", "list"}, {"nodes", nodes}, {"weights", g.weights}};
}

LambdaGrid lambda_grid_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "cartesian");
  if (kind == "cartesian") return LambdaGrid::cartesian(j.at("n").get<int>(), j.at("radius").get<double>());
  if (kind == "polar")
    return LambdaGrid::polar(j.at("n").get<int>(), j.at("angles").get<int>(), j.at("radius").get<double>());
  if (kind == "list") {
    std::vector<cplx> nodes;
    for (const auto& p : j.at("nodes")) nodes.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    std::vector<double> w = j.contains("weights") ? j.at("weights").get<std::vector<double>>()
                                                  : std::vector<double>(nodes.size(), 1.0);
    return LambdaGrid::from_nodes(std::move(nodes), std::move(w));
  }
  throw InputError("unknown λ-grid kind '" + kind + "'");
}

void save_scattering(const fs::path& dir, const ScatteringData& s) {
  std::vector<int> flags(s.flags.begin(), s.flags.end());
  write_array(dir / "lambda_nodes", s.grid.nodes, {s.size()});
  write_array(dir / "scattering_b", s.b, {s.size()},
              {{"grid", lambda_grid_to_json(s.grid)},
               {"flags", flags},
               {"provenance", s.provenance},
               {"diagnostics", s.diagnostics}});
}

ScatteringData load_scattering(const fs::path& dir) {
  const ComplexArray b = read_complex(dir / "scattering_b");
  const ComplexArray nodes = read_complex(dir / "lambda_nodes");
  ScatteringData s;
  s.grid = lambda_grid_from_json(b.meta.at("grid"));
  if (s.grid.size() != int(b.data.size()) || nodes.data.size() != b.data.size())
    throw InputError("io: scattering data do not match their λ-grid");
  for (int k = 0; k < s.grid.size(); ++k)
    if (std::abs(nodes.data[k] - s.grid.nodes[k]) > 1e-12 * std::max(1.0, s.grid.radius))
      throw InputError("io: stored λ-nodes differ from the rebuilt grid");
  s.b = b.data;
  for (int f : b.meta.at("flags").get<std::vector<int>>()) s.flags.push_back(std::uint8_t(f));
  s.provenance = "file";
  s.diagnostics = b.meta.value("diagnostics", nlohmann::json::object());
  s.diagnostics["source_provenance"] = b.meta.value("provenance", "");
  return s;
}

void save_mu_stack(const fs::path& dir, const FaddeevField& f) {
  if (f.slices.empty()) throw InputError("io: empty μ stack");
  const Grid2D& g = f.slices[0].grid;
  std::vector<cplx> data;
  nlohmann::json ls = nlohmann::json::array();
  for (const auto& s : f.slices) {
    data.insert(data.end(), s.mu.data(), s.mu.data() + s.mu.size());
    ls.push_back({s.lambda.real(), s.lambda.imag()});
  }
  write_array(dir / "mu_stack", data, {std::int64_t(f.slices.size()), g.n, g.n},
              {{"grid", grid_to_json(g)}, {"lambdas", ls}});
}

FaddeevField load_mu_stack(const fs::path& dir) {
  const ComplexArray a = read_complex(dir / "mu_stack");
  const Grid2D g = grid_from_json(a.meta.at("grid"));
  FaddeevField f;
  const auto& ls = a.meta.at("lambdas");
  for (std::size_t k = 0; k < ls.size(); ++k) {
    FaddeevSlice s;
    s.lambda = cplx(ls[k].at(0).get<double>(), ls[k].at(1).get<double>());
    s.grid = g;
    s.mu = Eigen::Map<const ComplexField>(&a.data[k * g.n * g.n], g.n, g.n);
    s.converged = true;
    f.lambdas.push_back(s.lambda);
    f.slices.push_back(std::move(s));
  }
  return f;
}

}  // namespace dbar::io
