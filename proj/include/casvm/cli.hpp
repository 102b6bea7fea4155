#pragma once

// Batch front-end: structured-text configs in, CSV out.  The command
// implementations are exposed for the test suites; tools/main.cpp only adds
// flag parsing around them.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casvm/model.hpp"

namespace casvm::cli {

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitCheckFailed = 4;

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// key/value sections; keys before any [section] live in the "" section
struct Config {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string canonical;  // normalized text, input to the provenance hash

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
};

Config parse_config_text(const std::string& text);
Config load_config_file(const std::string& path);

// FNV-1a over the canonical config text and the effective seed
std::string config_hash(const Config& cfg, std::uint64_t seed);

// numeric helpers shared with the tests
double parse_double(const std::string& text);               // accepts "inf"
std::vector<double> parse_double_list(const std::string&);  // "a b c" or "lo:hi:steps"

// model construction from config sections
CascadeModel build_cascade_model(const Config& cfg);
BroadcastModel build_broadcast_model(const Config& cfg);
SwitchingModel build_switching_model(const Config& cfg);  // honors builtin =

struct CommonOptions {
  std::uint64_t seed = 1;
  int trials = 1000;
};

int cmd_eval(const Config& cfg, const CommonOptions& opt, std::ostream& csv);
int cmd_optimize(const Config& cfg, const CommonOptions& opt, std::ostream& csv);

struct Fig6Options {
  double rb = 0.4;
  double delta = 0.6;
  std::vector<double> gammas = {0.1, 0.9};
  std::vector<double> etas;  // default 0..1 in 50 steps
  int coarse = 200;
  int fine = 2000;
};
int cmd_fig6(const Fig6Options& opt, const std::string& hash, std::ostream& csv);

// system: builtin name (prop2, prop3, prop2-mutated) or a file path; a
// custom file may bring its own target file, otherwise the variables absent
// from the target are eliminated and checked against the bundled region.
int cmd_fme_check(const std::string& system, const std::string& target_file, const CommonOptions& opt,
                  std::ostream& report);

struct OracleCheckOptions {
  int trials = 25;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::size_t max_alphabet = 4;
};
int cmd_oracle_check(const OracleCheckOptions& opt, std::ostream& report);

// full CLI: subcommand + flags; returns a process exit code
int run(int argc, const char* const* argv);

}  // namespace casvm::cli
