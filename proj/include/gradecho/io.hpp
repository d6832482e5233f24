#pragma once

// File emission: time-series CSV, metrics JSON, run manifests.

#include "gradecho/metrics.hpp"
#include "gradecho/solver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace gradecho::io {

/// "%.17e": round-trip scientific notation.
std::string format_double(double v);

/// Columns: t, re_in, im_in, re_out, im_out, abs2_out.
std::string trace_csv(const FieldRecord& rec);

nlohmann::json metrics_json(const metrics::EchoMetrics& m);
metrics::EchoMetrics metrics_from_json(const nlohmann::json& j);

struct RunManifest {
    std::string tool_version;
    std::string config_hash;
    std::string scenario_text; // canonical config of the resolved scenario
    GridSpec grid;             // grid actually used
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> files; // relative to the manifest directory
    std::string notes;
};

nlohmann::json manifest_json(const RunManifest& m);

/// Writes through a temporary sibling and renames it into place.
/// Throws Error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace gradecho::io
