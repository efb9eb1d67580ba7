#pragma once

#include "output.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace betatails::cli {

struct Common {
  std::uint64_t seed = 7;
  unsigned workers = 1;
  std::string output;
  std::string format;
};

class Command {
 public:
  virtual ~Command() = default;
  virtual std::string name() const = 0;
  virtual std::string description() const = 0;
  virtual std::string default_format() const { return "csv"; }
  virtual void add_options(CLI::App& app) = 0;
  /// Cross-option checks; throws std::invalid_argument before any sampling starts.
  virtual void validate() const {}
  virtual Result run(const Common& common) const = 0;
};

std::vector<std::unique_ptr<Command>> make_commands();

}  // namespace betatails::cli
