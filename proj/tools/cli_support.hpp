#pragma once

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "procnash/eval/harness.hpp"

namespace CLI {
class App;
}

namespace procnash::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kConfigError = 2,
  kVerificationFailure = 3,
  kTransportExhausted = 4,
};

// Thrown for anything the user can fix in flags or config files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "2..7", "3,5,8" or a single size.
std::vector<int> parse_sizes(const std::string& text);

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

// Rewrites argv so config entries come before the user's own arguments for
// the chosen subcommand. Options use take-last semantics, so flags win.
// Keys must name options of that subcommand.
std::vector<std::string> merge_config_args(const CLI::App& sub, const std::vector<std::string>& args,
                                           const std::vector<std::pair<std::string, std::string>>& entries);

std::string file_digest(const std::string& path);  // fnv1a64 of the bytes, hex

// Provenance record written next to each output as <out>.manifest.json.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void add_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }
  void add_input(const std::string& path) { inputs_.push_back(path); }
  void add_output(const std::string& path) { outputs_.push_back(path); }

  nlohmann::json to_json() const;
  void write(const std::string& out_path) const;

 private:
  std::string command_;
  std::vector<std::string> argv_;
  nlohmann::json config_ = nlohmann::json::object();
  std::map<std::string, std::uint64_t> seeds_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point started_;
  std::chrono::system_clock::time_point started_wall_;
};

// Markdown for a set of results files, padding tables and audit files. Each
// input is recognized by shape; cells with no data render as "--".
std::string render_report(const std::vector<nlohmann::json>& inputs);

// "0.18 ± 0.04"
std::string format_with_se(double value, double se);

}  // namespace procnash::cli
