#pragma once

// Tabular reports written as CSV (versioned, RFC-4180 quoting) or JSON.
// Doubles are rendered once with 13 significant digits and both writers use
// that rendering, so CSV and JSON carry identical values.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ruin2d {

inline constexpr int kSchemaVersion = 1;

using Cell = std::variant<double, std::int64_t, std::string>;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Human-readable summary lines (also emitted in JSON).
    std::vector<std::string> summary;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string render(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

inline void write_csv(std::ostream& os, const Table& t) {
    os << "# ruin2d " << t.command << " schema=v" << kSchemaVersion << "\r\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
    os << "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(render(row[i]));
        os << "\r\n";
    }
}

inline nlohmann::json to_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            const Cell& c = row[i];
            if (const auto* d = std::get_if<double>(&c)) {
                if (std::isfinite(*d))
                    obj[t.columns[i]] = std::stod(format_double(*d));
                else
                    obj[t.columns[i]] = format_double(*d);
            } else if (const auto* n = std::get_if<std::int64_t>(&c)) {
                obj[t.columns[i]] = *n;
            } else {
                obj[t.columns[i]] = std::get<std::string>(c);
            }
        }
        rows.push_back(std::move(obj));
    }
    return {{"schema", "ruin2d/" + t.command + "/v" + std::to_string(kSchemaVersion)},
            {"columns", t.columns},
            {"rows", rows},
            {"summary", t.summary}};
}

inline void write_json(std::ostream& os, const Table& t) { os << to_json(t).dump(2) << "\n"; }

}  // namespace ruin2d
