#include "bloch/cli/output.hpp"

#include <charconv>
#include <cmath>

#include "bloch/cli/config.hpp"

namespace bloch::cli {

namespace {

void flatten(const std::string& prefix, const nlohmann::json& value,
             std::vector<std::pair<std::string, std::string>>& cells) {
    if (value.is_object()) {
        for (const auto& [k, v] : value.items()) {
            flatten(prefix.empty() ? k : prefix + "." + k, v, cells);
        }
        return;
    }
    std::string text;
    if (value.is_number_float()) {
        text = format_number(value.get<double>());
    } else if (value.is_string()) {
        text = value.get<std::string>();
    } else {
        text = value.dump();
    }
    cells.emplace_back(prefix, std::move(text));
}

} // namespace

Format parse_format(const std::string& text) {
    if (text == "csv") {
        return Format::csv;
    }
    if (text == "json") {
        return Format::json;
    }
    throw ConfigError("format must be csv or json, got '" + text + "'");
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    std::string text(buf, ptr);
    if (text.find_first_of(".e") == std::string::npos) {
        text += ".0";
    }
    return text;
}

std::string dump_json(const nlohmann::json& value) { return value.dump(2) + "\n"; }

void write_table(std::ostream& os, const Table& table, Format format) {
    if (format == Format::json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : table.rows) {
            nlohmann::json obj = nlohmann::json::object();
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                obj[table.columns[c]] = row[c];
            }
            rows.push_back(std::move(obj));
        }
        os << dump_json(rows);
        return;
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        os << (c ? "," : "") << table.columns[c];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << (c ? "," : "") << format_number(row[c]);
        }
        os << '\n';
    }
}

void write_report(std::ostream& os, const nlohmann::json& report, Format format) {
    if (format == Format::json) {
        os << dump_json(report);
        return;
    }
    std::vector<std::pair<std::string, std::string>> cells;
    flatten("", report, cells);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        os << (i ? "," : "") << cells[i].first;
    }
    os << '\n';
    for (std::size_t i = 0; i < cells.size(); ++i) {
        os << (i ? "," : "") << cells[i].second;
    }
    os << '\n';
}

} // namespace bloch::cli
