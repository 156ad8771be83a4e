#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qthermo/models.hpp"

namespace qthermo::cli {

inline constexpr const char* kVersion = "qthermo 0.1.0";

/// Exit statuses of the qthermo tool.
enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kUsageError = 2 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shortest round-trip decimal form (at most 17 significant digits), '.' separator regardless of locale.
std::string format_real(double value);

struct SweepAxis {
  std::string name;
  double start = 0;
  double stop = 0;
  int steps = 0;

  /// Parses "name=start:stop:steps".
  static SweepAxis parse(const std::string& text);
  double at(int i) const;
};

struct SweepSpec {
  ModelId model = ModelId::Transverse;
  std::map<std::string, double> fixed;
  std::vector<SweepAxis> swept;
  std::vector<std::string> quantities;

  /// Throws UsageError on any violated invariant.
  void validate() const;
};

/// CSV text: '#' preamble with invocation and version, header row, one row per lattice point.
std::string sweep_csv(const SweepSpec& spec, const std::string& invocation);

struct CheckResult {
  std::string name;
  bool passed = true;
  long points = 0;
  double tolerance = 0;
  double worst = 0;
  /// Coordinates of the worst point, e.g. {"beta": 2, "tau": 0.5}.
  std::map<std::string, double> worst_at;
};

struct ValidationReport {
  std::string profile;
  std::vector<CheckResult> checks;
  bool passed() const;
  nlohmann::json to_json() const;
};

/// Oracle cross-checks on the standard grid ("strict") or every 4th grid point ("fast").
/// zeta_scale != 1 corrupts the analytic transverse state's zeta (sensitivity canary).
ValidationReport run_validate(const std::string& profile, double zeta_scale = 1.0);

struct EstimateRequest {
  ModelId model = ModelId::Transverse;
  double beta = 1;
  double theta = 0;
  double phi = 0;
  std::optional<double> tau;  // empty means "opt"
  std::int64_t shots = 100000;
  int replicates = 1000;
  std::uint64_t seed = 42;
};

nlohmann::json run_estimate(const EstimateRequest& request);

/// Full command-line entry point; returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qthermo::cli
