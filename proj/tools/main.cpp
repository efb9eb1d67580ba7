#include "commands.hpp"
#include "output.hpp"

#include "betatails/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using betatails::cli::Command;
using betatails::cli::Common;
using betatails::cli::ConfigEcho;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat key=value file. Blank lines and lines starting with '#' are ignored.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

bool truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

// Config values become ordinary flags so CLI11 validates them exactly like command-line input.
// Flags given explicitly win.
void inject_config(std::vector<std::string>& args, CLI::App& sub) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    const CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw(flag);
    if (opt == nullptr) throw std::invalid_argument("unknown config key '" + key + "' for " + sub.get_name());
    if (given_on_command_line(args, flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (truthy(value)) args.push_back(flag);
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
}

std::string option_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  std::string joined;
  for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
  if (opt->get_expected_min() == 0) return "true";
  return joined;
}

// Everything that determines the numbers. Workers and paths are excluded so that output
// files are byte-identical across worker counts and output locations.
ConfigEcho echo_config(const CLI::App& sub, const Common& c) {
  ConfigEcho echo;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name();
    if (name.rfind("--", 0) != 0) continue;
    const std::string key = name.substr(2);
    if (key == "help" || key == "workers" || key == "output" || key == "config") continue;
    echo.emplace_back(key, key == "format" ? c.format : option_value(opt));
  }
  return echo;
}

void write_manifest(const std::string& output, const std::string& command, const ConfigEcho& echo, const Common& c,
                    double seconds, int exit_code) {
  nlohmann::ordered_json m;
  m["version"] = BETATAILS_VERSION;
  m["command"] = command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : echo) cfg[k] = v;
  cfg["workers"] = c.workers;
  cfg["output"] = c.output;
  m["config"] = cfg;
  m["wall_time_seconds"] = seconds;
  m["exit_code"] = exit_code;
  std::ofstream out(output + ".manifest.json");
  if (out) out << m.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation of beta-ensemble and last passage percolation tails", "beta_tails"};
  app.set_version_flag("--version", BETATAILS_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto commands = betatails::cli::make_commands();
  std::map<std::string, Common> commons;
  std::map<CLI::App*, Command*> by_app;
  for (auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd->name(), cmd->description());
    Common& c = commons[cmd->name()];
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--output", c.output, "output file")->required();
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", "flat key=value file supplying defaults");
    cmd->add_options(*sub);
    by_app[sub] = cmd.get();
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if (auto* s = app.get_subcommand_no_throw(a)) {
      sub = s;
      break;
    }
  }

  try {
    if (sub != nullptr) inject_config(args, *sub);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  sub = app.get_subcommands().front();
  Command& cmd = *by_app.at(sub);
  Common& common = commons.at(cmd.name());
  if (common.format.empty()) common.format = cmd.default_format();
  const ConfigEcho echo = echo_config(*sub, common);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto fail = [&](int code, const std::string& what, bool remove_output) {
    std::cerr << "error: " << what << '\n';
    if (remove_output) std::remove(common.output.c_str());
    write_manifest(common.output, cmd.name(), echo, common, elapsed(), code);
    return code;
  };

  try {
    cmd.validate();
  } catch (const std::invalid_argument& e) {
    return fail(kConfigError, e.what(), false);
  }

  std::ofstream out(common.output, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write output file " << common.output << '\n';
    return kConfigError;
  }

  betatails::cli::Result result;
  try {
    result = cmd.run(common);
  } catch (const std::invalid_argument& e) {
    out.close();
    return fail(kConfigError, e.what(), true);
  } catch (const betatails::NumericalError& e) {
    out.close();
    return fail(kNumericalError, e.what(), true);
  }

  if (common.format == "json") {
    betatails::cli::write_json(out, cmd.name(), echo, result);
  } else {
    betatails::cli::write_csv(out, cmd.name(), echo, result);
  }
  out.close();
  if (!out) return fail(kConfigError, "failed writing " + common.output, false);

  if (!result.numerical_error.empty()) return fail(kNumericalError, result.numerical_error, false);
  write_manifest(common.output, cmd.name(), echo, common, elapsed(), kOk);
  return kOk;
}
