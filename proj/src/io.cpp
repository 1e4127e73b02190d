#include "oldroyd/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace oldroyd {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("sha256: digest computation failed");
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return hex.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  const std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return sha256_hex(content);
}

void write_vtk_rectilinear(const SimState& state, std::ostream& out) {
  const Mesh& mesh = state.conf.mesh();
  const std::size_t nv = mesh.num_vertices();
  const auto [lmin, lmax] = eigenvalue_fields(state.conf);
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\n"
      << "oldroyd t=" << state.t << " step=" << state.step << "\n"
      << "ASCII\nDATASET RECTILINEAR_GRID\n"
      << "DIMENSIONS " << mesh.n() + 1 << ' ' << mesh.n() + 1 << " 1\n";
  auto coords = [&out](const char* name, const std::vector<double>& c) {
    out << name << ' ' << c.size() << " double\n";
    for (std::size_t k = 0; k < c.size(); ++k) out << c[k] << (k + 1 < c.size() ? ' ' : '\n');
  };
  coords("X_COORDINATES", mesh.x_coords());
  coords("Y_COORDINATES", mesh.y_coords());
  out << "Z_COORDINATES 1 double\n0\n";
  out << "POINT_DATA " << nv << "\n";
  out << "VECTORS u double\n";
  for (std::size_t v = 0; v < nv; ++v) out << state.u[v].x << ' ' << state.u[v].y << " 0\n";
  auto scalars = [&](const char* name, auto&& value) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < nv; ++v) out << value(v) << '\n';
  };
  scalars("p", [&](std::size_t v) { return state.p[v]; });
  scalars("s11", [&](std::size_t v) { return state.conf[v].xx; });
  scalars("s12", [&](std::size_t v) { return state.conf[v].xy; });
  scalars("s22", [&](std::size_t v) { return state.conf[v].yy; });
  scalars("lambda_min", [&](std::size_t v) { return lmin[v]; });
  scalars("lambda_max", [&](std::size_t v) { return lmax[v]; });
}

nlohmann::json metrics_to_json(const Metrics& m, const SimState& state, const SimConfig& config) {
  nlohmann::ordered_json doc;
  doc["max_ln_s11_midline"] = m.max_ln_s11_midline;
  doc["max_s11_global"] = m.max_s11_global;
  doc["vortex_center_x"] = m.vortex_center.x;
  doc["vortex_center_y"] = m.vortex_center.y;
  doc["vortex_converged"] = m.vortex_converged;
  doc["lambda_min_global"] = m.lambda_min_global;
  doc["lambda_max_global"] = m.lambda_max_global;
  const RunSummary& s = state.summary;
  doc["run_min_lambda_min"] = s.min_lambda_min;
  doc["run_max_lambda_max"] = s.max_lambda_max;
  doc["run_max_clamp_distance"] = s.max_clamp_distance;
  doc["run_max_step_measure"] = s.max_step_measure;
  doc["run_max_solver_residual"] = s.max_solver_residual;
  doc["run_last_residual"] = s.last_residual;
  doc["run_steady_step"] = s.steady_step;
  doc["t"] = state.t;
  doc["step"] = state.step;
  doc["mesh"] = config.mesh.to_string();
  doc["wi"] = config.wi;
  doc["beta"] = config.beta;
  doc["dt"] = config.dt;
  doc["lid_profile"] = to_string(config.lid.variant);
  doc["config_sha256"] = sha256_hex(config.canonical_text());
  doc["version"] = std::string(kVersion);
  return nlohmann::json(doc);
}

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

RunLog::RunLog(const fs::path& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open run log '" + path.string() + "'");
  if (!append) out_ << header() << '\n';
  out_ << std::setprecision(10);
}

const char* RunLog::header() {
  return "step,t,residual,lambda_min,lambda_max,max_clamp_distance,step_measure,solver_residual";
}

void RunLog::write(const StepDiagnostics& d) {
  out_ << d.step << ',' << d.t << ',' << d.residual << ',' << d.lambda_min << ',' << d.lambda_max
       << ',' << d.max_clamp_distance << ',' << d.step_measure << ',' << d.solver_residual << '\n';
}

EmittedFile describe_file(const fs::path& dir, const fs::path& name) {
  const fs::path full = dir / name;
  return {name, sha256_file(full), fs::file_size(full)};
}

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

std::vector<EmittedFile> emit_fields(const SimState& state, const Metrics& metrics,
                                     const SimConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<EmittedFile> files;

  {
    std::ostringstream vtk;
    write_vtk_rectilinear(state, vtk);
    write_text_file(dir / "fields.vtk", vtk.str());
    files.push_back(describe_file(dir, "fields.vtk"));
  }

  struct Line {
    const char* file;
    Axis axis;
    double coordinate;
  };
  for (const Line& line : {Line{"section_top_y1.csv", Axis::horizontal, 1.0},
                           Line{"section_near_top_y0.75.csv", Axis::horizontal, 0.75},
                           Line{"section_mid_x0.5.csv", Axis::vertical, 0.5}}) {
    CrossSection cs = sample_cross_section(state.conf, line.axis, line.coordinate, config.samples);
    const CrossSection vel = sample_cross_section(state.u, line.axis, line.coordinate, config.samples);
    cs.names.insert(cs.names.end(), vel.names.begin(), vel.names.end());
    cs.columns.insert(cs.columns.end(), vel.columns.begin(), vel.columns.end());
    std::ostringstream csv;
    cs.write_csv(csv);
    write_text_file(dir / line.file, csv.str());
    files.push_back(describe_file(dir, line.file));
  }

  write_text_file(dir / "metrics.json", dump_json(metrics_to_json(metrics, state, config)));
  files.push_back(describe_file(dir, "metrics.json"));
  return files;
}

void write_manifest(const fs::path& dir, const SimConfig& config,
                    const std::vector<EmittedFile>& files, const std::string& started,
                    const std::string& finished) {
  nlohmann::ordered_json doc;
  doc["version"] = std::string(kVersion);
  doc["started"] = started;
  doc["finished"] = finished;
  nlohmann::ordered_json cfg;
  std::istringstream lines(config.canonical_text());
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    cfg[line.substr(0, eq)] = line.substr(eq + 1);
  }
  cfg["output_dir"] = config.output_dir;
  cfg["checkpoint_every"] = std::to_string(config.checkpoint_every);
  cfg["samples"] = std::to_string(config.samples);
  cfg["workers"] = std::to_string(config.workers);
  doc["config"] = cfg;
  doc["config_sha256"] = sha256_hex(config.canonical_text());
  nlohmann::ordered_json inventory = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    inventory.push_back({{"path", f.path.generic_string()}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  doc["files"] = inventory;
  write_text_file(dir / "manifest.json", doc.dump(2) + "\n");
}

VerifyResult verify_manifest(const fs::path& dir) {
  VerifyResult result;
  std::ifstream in(dir / "manifest.json");
  if (!in) {
    result.ok = false;
    result.problems.push_back("manifest.json not found in " + dir.string());
    return result;
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    result.ok = false;
    result.problems.push_back(std::string("manifest.json is not valid JSON: ") + e.what());
    return result;
  }
  for (const auto& f : doc.at("files")) {
    const fs::path p = dir / f.at("path").get<std::string>();
    if (!fs::exists(p)) {
      result.ok = false;
      result.problems.push_back("missing file " + p.string());
      continue;
    }
    if (sha256_file(p) != f.at("sha256").get<std::string>()) {
      result.ok = false;
      result.problems.push_back("hash mismatch for " + p.string());
    }
  }
  return result;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace oldroyd
