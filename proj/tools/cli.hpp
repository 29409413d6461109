#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavebound/geometry.hpp"

namespace wavebound::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kBadConfig = 2,
  kNonConvergence = 3,
  kMissingBranch = 4,
  kInvariantViolation = 5,
};

enum class Format { Csv, Json };

/// Fully resolved run configuration. Every computation is deterministic, so
/// identical configurations give byte-identical output.
struct RunConfig {
  std::string command;
  ModelKind model = ModelKind::A;
  double d = 1.0;
  std::optional<double> lambda;
  std::optional<double> delta;
  int modes = 64;
  int scan_points = 400;
  std::string out;  ///< empty: standard output
  Format format = Format::Csv;
  int jobs = 1;

  // sweep / analyze range
  double lambda_lo = 0.05;
  double lambda_hi = 3.0;
  double step = 0.05;
  bool range_given = false;

  // field / oracle / analyze
  int branch = 1;  ///< 1-based
  int nx = 201;
  int ny = 41;
  double x_halfwidth = 0.0;  ///< units of d; 0 means delta/d + 3

  // oracle
  std::vector<double> spacings{0.025, 0.0125, 0.00625};  ///< units of d
  double half_length = 0.0;                              ///< units of d; 0 means delta/d + 12

  // analyze
  double rho = 1.5;

  /// lambda = delta / d, from whichever of lambda / delta was given.
  double resolved_lambda() const;
  Geometry geometry() const;
};

/// Thrown for an invalid configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when the requested branch does not exist (exit code 4).
class MissingBranch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an emitted spectrum violates the bracketing bounds (exit code 5).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `wavebound <command> [options]` (args excludes the program name).
/// Returns std::nullopt after printing help to `out`. Throws ConfigError.
std::optional<RunConfig> parse_arguments(const std::vector<std::string>& args, std::ostream& out);

/// Runs a parsed configuration and returns the output document.
std::string execute(const RunConfig& config);

/// Full command-line entry point: parses, runs, writes to --out or `out`,
/// reports errors on `err`, and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wavebound::cli
