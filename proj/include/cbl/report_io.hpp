#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "cbl/experiment.hpp"

namespace cbl {

/// Renders every report file of the bundle as (relative path -> bytes).
/// Pure function of the bundle, so re-emission is byte-identical.
std::map<std::string, std::string> render_report(const ReportBundle& bundle);

/// Writes the rendered files under output_dir, each atomically
/// (temp file + rename). Throws EmissionError on I/O failure without
/// leaving partial final files behind.
void emit_report(const ReportBundle& bundle,
                 const std::filesystem::path& output_dir);

/// Writes one file atomically (used for CSV dumps from the CLI as well).
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

} // namespace cbl
