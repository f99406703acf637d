#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbar/faddeev.hpp"
#include "dbar/forward.hpp"
#include "dbar/scattering.hpp"

// Arrays are stored as flat little-endian float64 / complex128 (row-major in the listed shape,
// fastest index last) in `<stem>.bin`, described by `<stem>.json`:
//   {"dtype": "float64"|"complex128", "shape": [...], "convention": "...", ...metadata}
namespace dbar::io {

namespace fs = std::filesystem;

inline constexpr const char* convention_tag = "dbar/v1: d=(dx-i dy)/2, q=Lap(sqrt s)/sqrt s, dd^c f=Lap f dA";

struct RealArray {
  std::vector<double> data;
  std::vector<std::int64_t> shape;
  nlohmann::json meta;
};
struct ComplexArray {
  std::vector<cplx> data;
  std::vector<std::int64_t> shape;
  nlohmann::json meta;
};

void write_array(const fs::path& stem, const std::vector<double>& data, const std::vector<std::int64_t>& shape,
                 nlohmann::json meta = nlohmann::json::object());
void write_array(const fs::path& stem, const std::vector<cplx>& data, const std::vector<std::int64_t>& shape,
                 nlohmann::json meta = nlohmann::json::object());
RealArray read_real(const fs::path& stem);
ComplexArray read_complex(const fs::path& stem);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

nlohmann::json grid_to_json(const Grid2D& g);
Grid2D grid_from_json(const nlohmann::json& j);

void save_field(const fs::path& stem, const RealField& f, const Grid2D& g, nlohmann::json meta = nlohmann::json::object());
RealField load_field(const fs::path& stem, Grid2D* grid = nullptr);

/// "x,y,value" rows along the horizontal line through the grid centre.
void write_csv_slice(const fs::path& path, const RealField& f, const Grid2D& g);

// Stage files (each takes the stage directory).
void save_dtn(const fs::path& dir, const DtNData& d);
DtNData load_dtn(const fs::path& dir);

void save_traces(const fs::path& dir, const std::vector<BoundaryTrace>& traces);
/// Traces do not carry their nodes on disk; pass the nodes of the DtN data they came from.
std::vector<BoundaryTrace> load_traces(const fs::path& dir, const std::vector<geometry::BoundaryNode>& nodes);

nlohmann::json lambda_grid_to_json(const LambdaGrid& g);
LambdaGrid lambda_grid_from_json(const nlohmann::json& j);
void save_scattering(const fs::path& dir, const ScatteringData& s);
ScatteringData load_scattering(const fs::path& dir);

void save_mu_stack(const fs::path& dir, const FaddeevField& f);
FaddeevField load_mu_stack(const fs::path& dir);

}  // namespace dbar::io
