#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace betatails::cli {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Ordered key/value echo of the settings that determine the output.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct Result {
  Table table;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  // Set when the table is valid but a derived quantity (e.g. a fit) could not be computed.
  std::string numerical_error;
};

std::string format_double(double x);

/// CSV: config as "# key=value" lines, header, rows, then summary as "# summary.key=value" lines.
void write_csv(std::ostream& out, const std::string& command, const ConfigEcho& config, const Result& r);
/// JSON: {"command", "config", summary fields at top level, "rows": [{column: value}, ...]}.
void write_json(std::ostream& out, const std::string& command, const ConfigEcho& config, const Result& r);

}  // namespace betatails::cli
