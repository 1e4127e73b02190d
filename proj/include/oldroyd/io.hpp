#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oldroyd/driver.hpp"

namespace oldroyd {

inline constexpr std::string_view kVersion = "1.0.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Legacy VTK rectilinear grid with point data u, p, s11, s12, s22,
/// lambda_min and lambda_max.
void write_vtk_rectilinear(const SimState& state, std::ostream& out);

/// Flat metrics document: the benchmark quantities, run-wide diagnostics and
/// provenance (config hash, mesh, time). Contains no timestamps, so identical
/// runs give byte-identical output.
nlohmann::json metrics_to_json(const Metrics& metrics, const SimState& state,
                               const SimConfig& config);
std::string dump_json(const nlohmann::json& doc);

/// One CSV line per step.
class RunLog {
 public:
  explicit RunLog(const std::filesystem::path& path, bool append = false);
  void write(const StepDiagnostics& d);
  static const char* header();

 private:
  std::ofstream out_;
};

struct EmittedFile {
  std::filesystem::path path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Writes fields.vtk, the three lid-cavity cross sections (y = 1, y = 0.75,
/// x = 0.5) and metrics.json into `dir`; returns the files written.
std::vector<EmittedFile> emit_fields(const SimState& state, const Metrics& metrics,
                                     const SimConfig& config, const std::filesystem::path& dir);

/// manifest.json listing every file with its hash; written last.
void write_manifest(const std::filesystem::path& dir, const SimConfig& config,
                    const std::vector<EmittedFile>& files, const std::string& started,
                    const std::string& finished);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> problems;
};
VerifyResult verify_manifest(const std::filesystem::path& dir);

EmittedFile describe_file(const std::filesystem::path& dir, const std::filesystem::path& name);
std::string utc_timestamp();

}  // namespace oldroyd
