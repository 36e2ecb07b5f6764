#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "scatlab/io.hpp"
#include "scatlab/potentials.hpp"

namespace scatlab {

enum class ExitCode : int { Success = 0, AssertionFailed = 1, NumericFailure = 2, ConfigError = 3 };

enum class ConfigErrorKind { Parse, UnknownOp, MissingParameter, BadValue };
std::string to_string(ConfigErrorKind k);

// Any problem with the scenario itself. `where` names the line/column for
// parse errors and the JSON path otherwise.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string where, const std::string& what)
      : std::runtime_error(to_string(kind) + " at " + where + ": " + what),
        kind_(kind),
        where_(std::move(where)) {}
  ConfigErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ConfigErrorKind kind_;
  std::string where_;
};

using ParamValue = std::variant<double, bool, std::string, std::vector<double>>;

class Params {
 public:
  Params() = default;
  explicit Params(std::string path) : path_(std::move(path)) {}

  void set(const std::string& key, ParamValue v) { values_[key] = std::move(v); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, ParamValue>& values() const noexcept { return values_; }
  const std::string& path() const noexcept { return path_; }

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;

 private:
  const ParamValue* find(const std::string& key) const;
  std::string path_;
  std::map<std::string, ParamValue> values_;
};

// "gaussian:A[:scale]", "yukawa:A[:scale]", "aubin_talenti[:lambda]", "zero",
// "table:<csv path>".
Potential parse_potential(const std::string& spec, const std::string& where = "potential");

struct Expectation {
  std::string metric;
  std::optional<double> min, max;
};

struct Step {
  std::string op;
  Params params;
  std::vector<Expectation> expect;
};

struct Scenario {
  std::string name;
  std::string description;
  double expected_runtime = 0.0;  // seconds, informational
  unsigned seed = 7;
  std::string potential = "gaussian:0.5";  // default for steps without their own
  double r_max = 0.0;                      // 0: each op picks its own
  std::size_t points = 0;
  std::string output;  // default output directory (relative to the working directory)
  std::vector<Step> pipeline;
};

// JSON text -> Scenario. Throws ConfigError (Parse with line/column, BadValue
// with the field path). Ops are checked by validate_scenario, not here.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

// Unknown ops and missing required parameters; throws ConfigError.
void validate_scenario(const Scenario& s);

using Metrics = std::vector<std::pair<std::string, double>>;

struct OpOutcome {
  Metrics metrics;
  std::vector<std::pair<std::string, CsvTable>> tables;  // file stem -> table
  std::vector<std::pair<std::string, PlotSpec>> plots;   // file stem -> plot of a table
  std::string report;                                    // JSON text

  double metric(const std::string& name) const;  // throws when absent
};

struct OpContext {
  unsigned seed = 7;
  std::string potential = "gaussian:0.5";
  double r_max = 0.0;
  std::size_t points = 0;
};

struct OpInfo {
  std::string name;
  std::string description;
  std::vector<std::string> required;  // parameter names
};

const std::vector<OpInfo>& op_catalog();

// Runs one op; throws ConfigError for unknown ops/parameters and lets
// NumericError through.
OpOutcome run_op(const std::string& op, const Params& params, const OpContext& ctx = {});

struct StepResult {
  std::string op;
  Metrics metrics;
  std::vector<std::string> failures;  // violated expectations
  std::vector<std::filesystem::path> artifacts;
  std::string error;  // numeric error message, if any
};

struct RunOptions {
  std::filesystem::path out_dir;  // empty: scenario.output, then SCATLAB_OUT, then "scatlab-out"
  std::optional<unsigned> seed;
  unsigned threads = 1;
  bool write_artifacts = true;
};

struct RunResult {
  ExitCode code = ExitCode::Success;
  std::vector<StepResult> steps;
  std::filesystem::path out_dir;
  std::string message;
};

// Never throws for numeric failures or failed expectations; those set the
// exit code. ConfigError propagates.
RunResult run_scenario(const Scenario& s, const RunOptions& opts = {});

struct BuiltinScenario {
  std::string name;
  std::string description;
  double expected_runtime = 0.0;
  std::string json;
};

const std::vector<BuiltinScenario>& builtin_scenarios();
std::optional<Scenario> builtin_scenario(const std::string& name);

}  // namespace scatlab
