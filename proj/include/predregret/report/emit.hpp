#pragma once

// Report emission: CSV with a config header block, or JSON with the same
// field names. Formatting is fixed (12 significant digits, "C" locale) so
// identical configs produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace predregret {

using Json = nlohmann::ordered_json;

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values) {
        std::vector<std::string> row;
        row.reserve(values.size());
        for (double v : values) row.push_back(format_real(v));
        rows.push_back(std::move(row));
    }
    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct Report {
    std::map<std::string, std::string> config;  // resolved run configuration
    Table table;
    Json extra;  // non-tabular payload (certificates, summaries)
};

inline void write_csv(const Report& report, std::ostream& os) {
    for (const auto& [key, value] : report.config)
        os << "# " << key << "=" << value << "\n";
    for (auto it = report.extra.begin(); it != report.extra.end(); ++it)
        os << "# " << it.key() << "=" << it.value().dump() << "\n";
    for (std::size_t c = 0; c < report.table.columns.size(); ++c)
        os << report.table.columns[c]
           << (c + 1 == report.table.columns.size() ? "" : ",");
    os << "\n";
    for (const auto& row : report.table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << row[c] << (c + 1 == row.size() ? "" : ",");
        os << "\n";
    }
}

inline Json to_json(const Report& report) {
    Json j;
    j["config"] = Json::object();
    for (const auto& [key, value] : report.config) j["config"][key] = value;
    j["columns"] = report.table.columns;
    j["rows"] = Json::array();
    for (const auto& row : report.table.rows) j["rows"].push_back(row);
    for (auto it = report.extra.begin(); it != report.extra.end(); ++it)
        j[it.key()] = it.value();
    return j;
}

inline void write_json(const Report& report, std::ostream& os) {
    os << to_json(report).dump(2) << "\n";
}

inline void emit_report(const Report& report, const std::string& format,
                        std::ostream& os) {
    if (format == "csv")
        write_csv(report, os);
    else if (format == "json")
        write_json(report, os);
    else
        throw std::invalid_argument("unknown output format '" + format + "'");
}

inline void emit_report_file(const Report& report, const std::string& format,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    emit_report(report, format, out);
}

}  // namespace predregret
