#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace betatails::cli {

namespace {

using nlohmann::ordered_json;

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

ordered_json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? ordered_json(*d) : ordered_json(format_double(*d));
  return std::get<std::string>(c);
}

// Flattens nested summary objects into dotted keys for the CSV trailer.
void flatten(const std::string& prefix, const ordered_json& j, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(prefix.empty() ? k : prefix + "." + k, v, out);
  } else if (j.is_number_float()) {
    out << "# summary." << prefix << '=' << format_double(j.get<double>()) << '\n';
  } else if (j.is_string()) {
    out << "# summary." << prefix << '=' << j.get<std::string>() << '\n';
  } else {
    out << "# summary." << prefix << '=' << j.dump() << '\n';
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const std::string& command, const ConfigEcho& config, const Result& r) {
  out << "# command=" << command << '\n';
  for (const auto& [k, v] : config) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) out << (i ? "," : "") << r.table.columns[i];
  out << '\n';
  for (const auto& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
  flatten("", r.summary, out);
}

void write_json(std::ostream& out, const std::string& command, const ConfigEcho& config, const Result& r) {
  ordered_json j;
  j["command"] = command;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  for (const auto& [k, v] : r.summary.items()) j[k] = v;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.table.rows) {
    ordered_json o = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[r.table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << '\n';
}

}  // namespace betatails::cli
