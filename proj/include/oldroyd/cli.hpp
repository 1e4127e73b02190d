#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oldroyd/driver.hpp"

namespace oldroyd {

/// Bad flag, bad value or bad config file. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Reads a flat key=value file; '#' starts a comment. Keys use the names
/// printed by --print-config.
void apply_config_text(SimConfig& config, const std::string& text, const std::string& origin);
/// Full resolved config, including output settings, in config-file syntax.
std::string config_to_text(const SimConfig& config);

struct ParsedRun {
  SimConfig config;
  bool print_config = false;
  std::optional<std::filesystem::path> resume;
};

/// Parses the options of `oldroyd run` (without the program or subcommand
/// name). Precedence: defaults, then --config file, then flags. Validates the
/// result; throws ConfigError with a one-line message.
ParsedRun parse_config(const std::vector<std::string>& args);

/// Runs one simulation into config.output_dir: log.csv, optional checkpoints,
/// fields, metrics and finally manifest.json. Returns the final result.
RunResult run_to_directory(const SimConfig& config, const std::optional<std::filesystem::path>& resume,
                           std::ostream& progress);

struct BenchmarkSpec {
  double wi = 0.5;
  std::vector<MeshSpec> meshes;
  std::filesystem::path fixtures;
  std::filesystem::path output_dir = "oldroyd_benchmark";
  SimConfig base;  ///< everything but wi and mesh
};

struct BenchmarkRow {
  MeshSpec mesh;
  bool ok = false;
  std::string error;
  Metrics computed;
  std::optional<double> published_ln;
  std::optional<double> published_max;
  std::optional<Point> published_center;
};

/// Runs every mesh in turn; a failing run marks its row and the suite goes on.
/// Writes report.md and report.csv into spec.output_dir.
std::vector<BenchmarkRow> run_benchmark_suite(const BenchmarkSpec& spec, std::ostream& progress);

/// Entry point of the `oldroyd` executable.
int run_cli(int argc, char** argv);

}  // namespace oldroyd
