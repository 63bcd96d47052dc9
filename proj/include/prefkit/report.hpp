#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace prefkit {

inline constexpr const char* kToolVersion = "prefkit 0.1.0";

enum class ReportFormat { json, table, csv };

ReportFormat report_format_from_string(const std::string& name);

// Canonical rendering: json has sorted keys and fixed 6-significant-digit
// floats, table is aligned plain text, csv is RFC 4180 (CRLF, quoted as
// needed). The same report always renders to the same bytes.
std::string emit_report(const nlohmann::json& report, ReportFormat format);

// Canonical float formatting used across all report output.
std::string format_float(double value);

// {tool_version, seed, config_hash, inputs: {path: content hash}}.
nlohmann::json make_provenance(const nlohmann::json& config,
                               const std::vector<std::string>& input_paths);

// Content hash of a file, as used in provenance records.
std::string file_content_hash(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace prefkit
