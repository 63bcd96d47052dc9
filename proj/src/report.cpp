#include "prefkit/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "prefkit/util.hpp"

namespace prefkit {

using json = nlohmann::json;

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "table") return ReportFormat::table;
    if (name == "csv") return ReportFormat::csv;
    throw std::invalid_argument("unknown report format: " + name);
}

std::string format_float(double value) {
    if (!std::isfinite(value)) return value > 0 ? "inf" : (value < 0 ? "-inf" : "nan");
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%#.6g", value);
    return buf;
}

namespace {

// nlohmann::json already keeps object keys sorted; this walk pins number
// formatting so emission is canonical.
void emit_canonical(const json& value, std::string& out) {
    switch (value.type()) {
        case json::value_t::object: {
            out.push_back('{');
            bool first = true;
            for (auto it = value.begin(); it != value.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                out += json(it.key()).dump();
                out.push_back(':');
                emit_canonical(it.value(), out);
            }
            out.push_back('}');
            break;
        }
        case json::value_t::array: {
            out.push_back('[');
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (i) out.push_back(',');
                emit_canonical(value[i], out);
            }
            out.push_back(']');
            break;
        }
        case json::value_t::number_float:
            out += format_float(value.get<double>());
            break;
        default:
            out += value.dump();
    }
}

void flatten(const json& value, const std::string& prefix,
             std::vector<std::pair<std::string, json>>& rows) {
    if (value.is_object()) {
        for (auto it = value.begin(); it != value.end(); ++it) {
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
        }
    } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            flatten(value[i], prefix + "[" + std::to_string(i) + "]", rows);
        }
    } else {
        rows.emplace_back(prefix, value);
    }
}

std::string scalar_to_string(const json& value) {
    if (value.is_number_float()) return format_float(value.get<double>());
    if (value.is_string()) return value.get<std::string>();
    return value.dump();
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string emit_table(const json& report) {
    std::vector<std::pair<std::string, json>> rows;
    flatten(report, "", rows);
    std::size_t width = 0;
    for (const auto& [key, _] : rows) width = std::max(width, key.size());
    std::string out;
    for (const auto& [key, value] : rows) {
        out += key;
        out.append(width - key.size() + 2, ' ');
        out += scalar_to_string(value);
        out.push_back('\n');
    }
    return out;
}

std::string emit_csv(const json& report) {
    std::vector<std::pair<std::string, json>> rows;
    flatten(report, "", rows);
    std::string out = "key,value\r\n";
    for (const auto& [key, value] : rows) {
        out += csv_escape(key);
        out.push_back(',');
        out += csv_escape(scalar_to_string(value));
        out += "\r\n";
    }
    return out;
}

}  // namespace

std::string emit_report(const json& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: {
            std::string out;
            emit_canonical(report, out);
            out.push_back('\n');
            return out;
        }
        case ReportFormat::table:
            return emit_table(report);
        case ReportFormat::csv:
            return emit_csv(report);
    }
    return {};
}

std::string file_content_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buffer.str())));
    return buf;
}

json make_provenance(const json& config, const std::vector<std::string>& input_paths) {
    json inputs = json::object();
    for (const std::string& path : input_paths) inputs[path] = file_content_hash(path);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config.dump())));
    return json{{"tool_version", kToolVersion},
                {"config", config},
                {"config_hash", buf},
                {"inputs", inputs}};
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace prefkit
