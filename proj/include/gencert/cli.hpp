#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gencert/io.hpp"

namespace gencert::cli {

enum class ParamType { Int, Real, Text, Bool };

struct ParamSpec {
  std::string name;  // flag name without dashes, also the manifest key
  ParamType type;
  std::string fallback;  // default, as it would be typed on the command line
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
};

const std::vector<CommandSpec>& command_specs();
const CommandSpec& find_command(const std::string& name);

struct RunConfig {
  std::string command;
  io::Json params = io::Json::object();  // every parameter, defaults materialized
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

// Fills every parameter of `command` that is missing from `given` with its
// default and converts all values to their declared types.
io::Json resolve_params(const std::string& command, const std::map<std::string, std::string>& given);

// --help anywhere on the command line; what() is the rendered help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses argv (argv[0] is the program name). Throws ValidationError on
// unknown flags, unknown config keys or malformed values.
RunConfig parse_args(const std::vector<std::string>& args);

std::uint64_t config_hash(const RunConfig& cfg);

// "inf", a plain number, or a multiple of N such as "0.4N".
double parse_beta(const std::string& expr, double n);
std::vector<double> parse_beta_list(const std::string& list, double n);
std::vector<std::size_t> parse_size_list(const std::string& list);

// Key-value sweep manifest: one "key = v1, v2, ..." per line, '#' comments.
// Returns the cartesian product in file order (last key fastest).
std::vector<std::map<std::string, std::string>> parse_sweep_manifest(const std::string& text);

struct RunResult {
  int exit_code = 0;
  io::Json summary = io::Json::object();
  std::vector<std::filesystem::path> artifacts;
};

// Executes the command, writes manifest.json and the artifacts under
// cfg.out_dir. Exit codes: 0 success, 2 validation error, 3 numerical
// failure; on failure summary holds the error record (also error.json).
RunResult run(RunConfig cfg);

// Full command-line entry point; prints the summary JSON to `out` and
// errors to `err`.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace detail {

// Typed read access to resolved parameters.
class Params {
 public:
  explicit Params(io::Json& j) : j_(j) {}
  long long integer(const std::string& k) const;
  std::size_t size(const std::string& k) const;
  double real(const std::string& k) const;
  std::string text(const std::string& k) const;
  bool flag(const std::string& k) const;
  void set(const std::string& k, io::Json v) { j_[k] = std::move(v); }
  const io::Json& raw(const std::string& k) const { return j_.at(k); }

 private:
  io::Json& j_;
};

struct CommandContext {
  Params params;
  std::uint64_t seed;
  std::filesystem::path out_dir;
  io::Json summary = io::Json::object();
  std::vector<std::filesystem::path> artifacts;

  void write(const std::string& name, const std::string& content);
};

using CommandFn = std::function<void(CommandContext&)>;
const std::map<std::string, CommandFn>& command_table();

}  // namespace detail

}  // namespace gencert::cli
