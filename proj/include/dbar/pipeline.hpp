#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dbar/config.hpp"

namespace dbar {

inline constexpr const char* manifest_version = "1";

/// Runs one stage, reading its input from `<out>/<input stage>/` and writing `<out>/<stage>/`.
/// Returns the stage's diagnostics (residuals, counts, timings of substeps).
nlohmann::json run_stage(const RunConfig& cfg, const std::string& stage);

/// Validates the config (and the presence of inputs for the first requested stage), then runs the
/// requested stages in order. `<out>/manifest.json` is rewritten after every stage, and with
/// "status": "error" and the message before an exception propagates.
nlohmann::json run_pipeline(const RunConfig& cfg);

/// Errors of a stored reconstruction against the configured phantom.
nlohmann::json reconstruction_metrics(const RunConfig& cfg);

}  // namespace dbar
