#pragma once

// Batch driver: suites of checks over parameter grids, verdicts under the
// certification policy, and JSON / CSV reports.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beckner/deficit.hpp"

namespace beckner {

enum class Verdict { pass, fail, saturated, inconclusive };
std::string to_string(Verdict v);

/// Parameter lists; an empty list selects the suite default.
struct Grid {
  std::vector<int> d;
  std::vector<double> b, m, p, t;
};

struct SuiteConfig {
  std::string suite = "all";  // measures, qtm, bessel, gamma2, cauchy, sphere, all
  Grid grid;                  // applies to every suite
  std::map<std::string, Grid> per_suite;  // [suite] sections of the config file
  double tol = 1e-10;         // quadrature abs and rel tolerance
  std::uint64_t seed = 20240101;
  std::string out;            // empty writes to stdout
  std::string format = "json";
  bool deterministic_timestamps = false;

  /// Throws ConfigError when a grid violates a suite precondition.
  void validate() const;
  /// Lists of the suite after overrides, default values filled in.
  Grid grid_for(const std::string& suite) const;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"measures", "qtm", "bessel", "gamma2", "cauchy", "sphere"};
  return names;
}

/// key = value lines, '#' comments, [suite] section headers.  Lists are
/// comma separated.  Unknown keys throw ConfigError.
SuiteConfig parse_config(std::istream& in);
SuiteConfig load_config(const std::string& path);
/// Applies one key = value pair; used by the file parser and the CLI flags.
void apply_setting(SuiteConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

struct CheckRecord {
  std::string id;
  std::string param_json;  // compact JSON object, keys sorted
  double lhs = 0.0, lhs_err = 0.0;
  double rhs = 0.0, rhs_err = 0.0;
  double deficit = 0.0;
  Verdict verdict = Verdict::pass;
  double seconds = 0.0;
  std::string note;
};

struct RunReport {
  SuiteConfig config;
  std::vector<CheckRecord> checks;  // ordered by id, then params
  int n_pass = 0, n_fail = 0, n_saturated = 0, n_inconclusive = 0;
  std::string version;
  std::string timestamp;

  /// 0 all pass, 1 any fail, 3 inconclusive without failures.
  int exit_code() const;
};

/// Runs every check of config.suite (all six for "all") in a work pool.
RunReport run_suite(const SuiteConfig& config);

/// Statement, preconditions and parameter meanings of a check family.
/// Throws UnknownCheck.
std::string explain_check(const std::string& id);
std::vector<std::string> check_ids();

/// Verdict of an inequality instance; expect_saturation demands the
/// saturated label.
Verdict verdict_of(const DeficitReport& r, bool expect_saturation = false);

std::string to_json(const RunReport& r);
std::string to_csv(const RunReport& r);
/// Writes to config.out or stdout in config.format; IoError if unwritable.
void write_report(const RunReport& r);

}  // namespace beckner
