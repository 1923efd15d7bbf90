#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace bloch::cli {

enum class Format {
    csv,
    json,
};

Format parse_format(const std::string& text);

// Shortest round-trip decimal; integral values keep a trailing ".0".
std::string format_number(double value);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// CSV: header row, comma separated, '\n' line endings, no trailing delimiter.
// JSON: array of row objects.
void write_table(std::ostream& os, const Table& table, Format format);

// JSON: the object with lexicographically ordered keys. CSV: nested keys flattened with '.'.
void write_report(std::ostream& os, const nlohmann::json& report, Format format);

std::string dump_json(const nlohmann::json& value);

} // namespace bloch::cli
