#include "oldroyd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oldroyd/errors.hpp"
#include "oldroyd/io.hpp"

#ifndef OLDROYD_DEFAULT_FIXTURES
#define OLDROYD_DEFAULT_FIXTURES "data/cavity_published.json"
#endif

namespace oldroyd {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  return v;
}

long parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": '" + text + "' is not an integer");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

SymTensor2 parse_tensor(const std::string& text, const std::string& key) {
  std::vector<double> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(parse_number(item, key));
  if (parts.size() != 3) throw ConfigError(key + ": expected three comma-separated values s11,s12,s22");
  return {parts[0], parts[1], parts[2]};
}

MeshSpec parse_mesh(const std::string& text) {
  try {
    return MeshSpec::parse(trim(text));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("mesh: ") + e.what());
  }
}

LidVariant parse_lid(const std::string& text) {
  try {
    return parse_lid_variant(trim(text));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("lid-profile: ") + e.what());
  }
}

void set_key(SimConfig& c, std::string key, const std::string& value) {
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "wi") c.wi = parse_number(value, key);
  else if (key == "beta") c.beta = parse_number(value, key);
  else if (key == "dt") c.dt = parse_number(value, key);
  else if (key == "t_end") c.t_end = parse_number(value, key);
  else if (key == "mesh") c.mesh = parse_mesh(value);
  else if (key == "lid_profile") c.lid.variant = parse_lid(value);
  else if (key == "lid_amplitude") c.lid.amplitude = parse_number(value, key);
  else if (key == "lid_rate") c.lid.rate = parse_number(value, key);
  else if (key == "lid_center") c.lid.center = parse_number(value, key);
  else if (key == "initial_conformation") c.initial_conformation = parse_tensor(value, key);
  else if (key == "steady_tol") c.steady_tol = parse_number(value, key);
  else if (key == "stop_when_steady") c.stop_when_steady = parse_bool(value, key);
  else if (key == "check_threshold") c.check_threshold = parse_number(value, key);
  else if (key == "output_dir") c.output_dir = trim(value);
  else if (key == "checkpoint_every") c.checkpoint_every = parse_integer(value, key);
  else if (key == "samples") c.samples = static_cast<int>(parse_integer(value, key));
  else if (key == "workers") c.workers = static_cast<int>(parse_integer(value, key));
  else throw ConfigError("unknown config key '" + key + "'");
}

void validate_or_throw(const SimConfig& c) {
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// Options shared by `run` and parse_config. Values are held as strings so
// that only flags actually given override the config file.
struct RunFlags {
  std::string config_file;
  std::map<std::string, CLI::Option*> options;
  std::map<std::string, std::string> values;
  std::vector<std::string> meshes;
  CLI::Option* mesh_option = nullptr;
  bool stop_when_steady = false;
  CLI::Option* stop_option = nullptr;
  bool print_config = false;
  std::string resume;
  CLI::Option* resume_option = nullptr;
};

void add_run_options(CLI::App& app, RunFlags& f) {
  app.add_option("--config", f.config_file, "key=value config file (flags override it)");
  const std::vector<std::pair<std::string, std::string>> scalar_flags = {
      {"wi", "Weissenberg number"},
      {"beta", "viscosity ratio, 0 < beta <= 1"},
      {"dt", "time step"},
      {"t-end", "final time"},
      {"lid-profile", "standard | as-printed"},
      {"lid-amplitude", "lid ramp amplitude A"},
      {"lid-rate", "lid ramp rate"},
      {"lid-center", "lid ramp centre time"},
      {"initial-conformation", "uniform initial conformation s11,s12,s22"},
      {"steady-tol", "steady-state residual tolerance"},
      {"check-threshold", "time-step bound on dt * max(|u|, |grad u|)"},
      {"output-dir", "output directory"},
      {"checkpoint-every", "steps between checkpoints (0 = never)"},
      {"samples", "points per exported cross-section"},
      {"workers", "threads for the conformation update"},
  };
  for (const auto& [name, help] : scalar_flags) {
    f.options[name] = app.add_option("--" + name, f.values[name], help);
  }
  f.mesh_option = app.add_option("--mesh", f.meshes, "ratio:N[:gamma] | quadratic:N | uniform:N");
  f.stop_option = app.add_flag("--stop-when-steady", f.stop_when_steady,
                               "stop once the steady residual drops below --steady-tol");
  app.add_flag("--print-config", f.print_config, "print the resolved configuration and exit");
  f.resume_option = app.add_option("--resume", f.resume, "checkpoint file to continue from");
}

ParsedRun resolve(const RunFlags& f) {
  ParsedRun out;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw ConfigError("cannot read config file '" + f.config_file + "'");
    std::stringstream text;
    text << in.rdbuf();
    apply_config_text(out.config, text.str(), f.config_file);
  }
  for (const auto& [name, opt] : f.options) {
    if (opt->count() > 0) set_key(out.config, name, f.values.at(name));
  }
  if (f.mesh_option->count() > 0) {
    const MeshSpec first = parse_mesh(f.meshes.front());
    for (const auto& m : f.meshes) {
      if (!(parse_mesh(m) == first)) {
        throw ConfigError("conflicting --mesh values '" + f.meshes.front() + "' and '" + m +
                          "'; give exactly one mesh");
      }
    }
    out.config.mesh = first;
  }
  if (f.stop_option->count() > 0) out.config.stop_when_steady = f.stop_when_steady;
  if (f.resume_option->count() > 0) out.resume = f.resume;
  out.print_config = f.print_config;
  validate_or_throw(out.config);
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
}

std::string mesh_dir_name(const MeshSpec& m) {
  std::string s = m.to_string();
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

std::string rel_diff(double computed, std::optional<double> published) {
  if (!published || *published == 0.0) return "";
  std::ostringstream ss;
  ss << std::showpos << std::fixed << std::setprecision(2)
     << 100.0 * (computed - *published) / *published << "%";
  return ss.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string format_center(Point c) { return fixed(c.x, 3) + ", " + fixed(c.y, 3); }

std::string optional_number(const nlohmann::json& row, const char* key, int digits) {
  if (!row.contains(key) || row[key].is_null()) return "-";
  return fixed(row[key].get<double>(), digits);
}

}  // namespace

void apply_config_text(SimConfig& config, const std::string& text, const std::string& origin) {
  std::istringstream lines(text);
  int line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key=value, got '" + line + "'");
    try {
      set_key(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

std::string config_to_text(const SimConfig& config) {
  std::ostringstream ss;
  ss << config.canonical_text() << "output_dir=" << config.output_dir << '\n'
     << "checkpoint_every=" << config.checkpoint_every << '\n'
     << "samples=" << config.samples << '\n'
     << "workers=" << config.workers << '\n';
  return ss.str();
}

ParsedRun parse_config(const std::vector<std::string>& args) {
  CLI::App app{"oldroyd run"};
  RunFlags flags;
  add_run_options(app, flags);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  return resolve(flags);
}

RunResult run_to_directory(const SimConfig& config, const std::optional<fs::path>& resume,
                           std::ostream& progress) {
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  const std::string started = utc_timestamp();

  std::unique_ptr<Simulation> sim;
  bool append_log = false;
  if (resume) {
    sim = std::make_unique<Simulation>(config, load_checkpoint(resume->string()));
    append_log = fs::exists(dir / "log.csv");
    progress << "resumed from " << resume->string() << " at step " << sim->state().step << '\n';
  } else {
    sim = std::make_unique<Simulation>(config);
  }
  write_file(dir / "config.txt", config_to_text(config));

  const long total = config.total_steps();
  const long report_every = std::max(1L, total / 20);
  const fs::path checkpoint = dir / "checkpoint.bin";
  {
    RunLog log(dir / "log.csv", append_log);
    try {
      sim->run([&](const StepDiagnostics& d, const SimState& s) {
        log.write(d);
        if (config.checkpoint_every > 0 && s.step % config.checkpoint_every == 0) {
          save_checkpoint(s, checkpoint.string());
        }
        if (s.step % report_every == 0) {
          progress << "step " << s.step << "/" << total << "  t=" << s.t
                   << "  residual=" << d.residual << "  lambda_min=" << d.lambda_min << '\n';
        }
      });
    } catch (const NumericalError& e) {
      std::ostringstream report;
      report << "numerical failure at step " << sim->state().step + 1 << ": " << e.what() << "\n"
             << "recent steps:\n" << RunLog::header() << '\n';
      for (const auto& d : sim->recent()) {
        report << d.step << ',' << d.t << ',' << d.residual << ',' << d.lambda_min << ','
               << d.lambda_max << ',' << d.max_clamp_distance << ',' << d.step_measure << ','
               << d.solver_residual << '\n';
      }
      write_file(dir / "failure.txt", report.str());
      save_checkpoint(sim->state(), (dir / "last_good.bin").string());
      throw;
    }
  }

  RunResult result{sim->state(), compute_metrics(sim->state().u, sim->state().conf)};
  std::vector<EmittedFile> files = emit_fields(result.state, result.metrics, config, dir);
  files.push_back(describe_file(dir, "config.txt"));
  files.push_back(describe_file(dir, "log.csv"));
  if (fs::exists(checkpoint)) files.push_back(describe_file(dir, "checkpoint.bin"));
  write_manifest(dir, config, files, started, utc_timestamp());
  return result;
}

std::vector<BenchmarkRow> run_benchmark_suite(const BenchmarkSpec& spec, std::ostream& progress) {
  std::ifstream in(spec.fixtures);
  if (!in) throw ConfigError("cannot read fixtures file '" + spec.fixtures.string() + "'");
  nlohmann::json fixtures;
  try {
    in >> fixtures;
  } catch (const std::exception& e) {
    throw ConfigError("fixtures file '" + spec.fixtures.string() + "': " + e.what());
  }
  std::vector<nlohmann::json> literature;
  for (const auto& row : fixtures.at("rows")) {
    if (std::abs(row.at("wi").get<double>() - spec.wi) < 1e-12 && row.at("mesh").is_null()) {
      literature.push_back(row);
    }
  }

  std::vector<BenchmarkRow> rows;
  for (const MeshSpec& mesh : spec.meshes) {
    BenchmarkRow row;
    row.mesh = mesh;
    for (const auto& f : fixtures.at("rows")) {
      if (f.at("mesh").is_null() || std::abs(f.at("wi").get<double>() - spec.wi) > 1e-12) continue;
      if (!(MeshSpec::parse(f.at("mesh").get<std::string>()) == mesh)) continue;
      row.published_ln = f.at("max_ln_s11_midline").get<double>();
      if (!f.at("max_s11_global").is_null()) row.published_max = f.at("max_s11_global").get<double>();
      row.published_center = Point{f.at("vortex_center")[0].get<double>(), f.at("vortex_center")[1].get<double>()};
    }
    SimConfig config = spec.base;
    config.wi = spec.wi;
    config.mesh = mesh;
    config.output_dir = (spec.output_dir / mesh_dir_name(mesh)).string();
    progress << "benchmark: Wi=" << spec.wi << " mesh " << mesh.to_string() << '\n';
    try {
      validate_or_throw(config);
      row.computed = run_to_directory(config, std::nullopt, progress).metrics;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      progress << "benchmark: " << mesh.to_string() << " failed: " << e.what() << '\n';
    }
    rows.push_back(row);
  }

  fs::create_directories(spec.output_dir);
  std::ostringstream md;
  md << "# Lid-driven cavity benchmark, Wi = " << shortest(spec.wi) << ", beta = "
     << shortest(spec.base.beta) << "\n\n"
     << "Published values are hand transcriptions from `" << spec.fixtures.filename().string()
     << "`, not computed results.\n\n"
     << "| Mesh | status | max ln(s11) on x=0.5 | published | diff | max s11 | published | diff "
        "| x_c, y_c | published |\n"
     << "|---|---|---|---|---|---|---|---|---|---|\n";
  std::ostringstream csv;
  csv << "mesh,status,max_ln_s11_midline,published_ln,rel_diff_ln,max_s11_global,published_max,"
         "rel_diff_max,x_c,y_c,published_x_c,published_y_c\n";
  for (const auto& r : rows) {
    const std::string status = r.ok ? "ok" : "failed: " + r.error;
    const std::string pub_ln = r.published_ln ? fixed(*r.published_ln, 2) : "-";
    const std::string pub_max = r.published_max ? fixed(*r.published_max, 2) : "-";
    const std::string pub_c = r.published_center ? format_center(*r.published_center) : "-";
    if (r.ok) {
      const Metrics& m = r.computed;
      md << "| " << r.mesh.to_string() << " | ok | " << fixed(m.max_ln_s11_midline, 2) << " | "
         << pub_ln << " | " << rel_diff(m.max_ln_s11_midline, r.published_ln) << " | "
         << fixed(m.max_s11_global, 2) << " | " << pub_max << " | "
         << rel_diff(m.max_s11_global, r.published_max) << " | " << format_center(m.vortex_center)
         << " | " << pub_c << " |\n";
      csv << r.mesh.to_string() << ",ok," << shortest(m.max_ln_s11_midline) << ','
          << (r.published_ln ? shortest(*r.published_ln) : "") << ','
          << rel_diff(m.max_ln_s11_midline, r.published_ln) << ',' << shortest(m.max_s11_global)
          << ',' << (r.published_max ? shortest(*r.published_max) : "") << ','
          << rel_diff(m.max_s11_global, r.published_max) << ',' << shortest(m.vortex_center.x)
          << ',' << shortest(m.vortex_center.y) << ','
          << (r.published_center ? shortest(r.published_center->x) : "") << ','
          << (r.published_center ? shortest(r.published_center->y) : "") << '\n';
    } else {
      std::string one_line = status;
      std::replace(one_line.begin(), one_line.end(), '\n', ' ');
      std::replace(one_line.begin(), one_line.end(), '|', '/');
      md << "| " << r.mesh.to_string() << " | " << one_line << " | - | " << pub_ln << " | | - | "
         << pub_max << " | | - | " << pub_c << " |\n";
      std::replace(one_line.begin(), one_line.end(), ',', ';');
      csv << r.mesh.to_string() << ',' << one_line << ",,,,,,,,,,\n";
    }
  }
  if (!literature.empty()) {
    md << "\nOther published results (transcribed):\n\n"
       << "| Source | max ln(s11) on x=0.5 | max s11 | x_c, y_c |\n|---|---|---|---|\n";
    for (const auto& l : literature) {
      const auto& c = l.at("vortex_center");
      md << "| " << l.at("source").get<std::string>() << " | " << optional_number(l, "max_ln_s11_midline", 2)
         << " | " << optional_number(l, "max_s11_global", 2) << " | "
         << format_center({c[0].get<double>(), c[1].get<double>()}) << " |\n";
    }
  }
  write_file(spec.output_dir / "report.md", md.str());
  write_file(spec.output_dir / "report.csv", csv.str());
  return rows;
}

namespace {

void report_error(const char* kind, const std::exception& e) {
  std::cerr << "oldroyd: " << kind << ": " << e.what() << '\n';
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Oldroyd-B lid-driven cavity solver (Re = 0)", "oldroyd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CLI::App* run = app.add_subcommand("run", "run one simulation and write its outputs");
  RunFlags run_flags;
  add_run_options(*run, run_flags);

  CLI::App* bench = app.add_subcommand("benchmark", "run the benchmark meshes and compare with published values");
  double bench_wi = 0.5;
  std::vector<std::string> bench_meshes;
  std::string fixtures = OLDROYD_DEFAULT_FIXTURES;
  std::string bench_dir = "oldroyd_benchmark";
  std::string bench_t_end, bench_dt, bench_lid;
  int bench_workers = 1;
  bench->add_option("--wi", bench_wi, "Weissenberg number")->capture_default_str();
  CLI::Option* meshes_opt = bench->add_option("--meshes", bench_meshes, "comma-separated mesh list")->delimiter(',');
  bench->add_option("--fixtures", fixtures, "published values (JSON)")->capture_default_str();
  bench->add_option("--output-dir", bench_dir, "report directory")->capture_default_str();
  CLI::Option* t_end_opt = bench->add_option("--t-end", bench_t_end, "final time (default 10 for Wi <= 0.5, else 30)");
  CLI::Option* dt_opt = bench->add_option("--dt", bench_dt, "time step");
  CLI::Option* lid_opt = bench->add_option("--lid-profile", bench_lid, "standard | as-printed");
  bench->add_option("--workers", bench_workers, "threads for the conformation update");

  CLI::App* verify = app.add_subcommand("verify", "check an output directory against its manifest");
  std::string verify_dir;
  verify->add_option("dir", verify_dir, "output directory")->required();

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "print mesh statistics, optionally export coordinates");
  std::string mesh_text;
  std::string export_path;
  mesh_cmd->add_option("--mesh", mesh_text, "mesh spec")->required();
  mesh_cmd->add_option("--export", export_path, "write the coordinate arrays to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      const ParsedRun parsed = resolve(run_flags);
      if (parsed.print_config) {
        std::cout << config_to_text(parsed.config);
        return kExitOk;
      }
      const RunResult result = run_to_directory(parsed.config, parsed.resume, std::cout);
      std::cout << dump_json(metrics_to_json(result.metrics, result.state, parsed.config));
      return kExitOk;
    }
    if (bench->parsed()) {
      BenchmarkSpec spec;
      spec.wi = bench_wi;
      spec.fixtures = fixtures;
      spec.output_dir = bench_dir;
      if (meshes_opt->count() > 0) {
        for (const auto& m : bench_meshes) {
          if (!trim(m).empty()) spec.meshes.push_back(parse_mesh(m));
        }
      } else if (bench_wi <= 0.5) {
        spec.meshes = {parse_mesh("ratio:90"), parse_mesh("ratio:120"), parse_mesh("ratio:150")};
      } else {
        spec.meshes = {parse_mesh("ratio:180")};
      }
      spec.base.wi = bench_wi;
      spec.base.t_end = bench_wi <= 0.5 ? 10.0 : 30.0;
      if (t_end_opt->count() > 0) spec.base.t_end = parse_number(bench_t_end, "t-end");
      if (dt_opt->count() > 0) spec.base.dt = parse_number(bench_dt, "dt");
      if (lid_opt->count() > 0) spec.base.lid.variant = parse_lid(bench_lid);
      spec.base.workers = bench_workers;
      validate_or_throw(spec.base);
      const auto rows = run_benchmark_suite(spec, std::cout);
      std::cout << "report written to " << (spec.output_dir / "report.md").string() << '\n';
      const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const BenchmarkRow& r) { return r.ok; });
      return all_ok ? kExitOk : kExitNumerical;
    }
    if (verify->parsed()) {
      const VerifyResult v = verify_manifest(verify_dir);
      for (const auto& p : v.problems) std::cout << "FAIL " << p << '\n';
      if (v.ok) std::cout << "OK " << verify_dir << '\n';
      return v.ok ? kExitOk : kExitVerifyFailed;
    }
    if (mesh_cmd->parsed()) {
      const Mesh mesh = parse_mesh(mesh_text).build();
      const MeshStatistics st = mesh.statistics();
      std::cout << std::setprecision(6) << "elements " << st.n_elements << "\nh_min " << st.h_min
                << "\nh_max " << st.h_max << '\n';
      if (!export_path.empty()) {
        std::ofstream out(export_path);
        if (!out) throw std::runtime_error("cannot open '" + export_path + "' for writing");
        mesh.write_text(out);
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    report_error("config error", e);
    return kExitConfig;
  } catch (const FormatError& e) {
    report_error("bad input file", e);
    return kExitConfig;
  } catch (const NumericalError& e) {
    report_error("numerical failure", e);
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    report_error("config error", e);
    return kExitConfig;
  } catch (const std::exception& e) {
    report_error("error", e);
    return 1;
  }
  return kExitOk;
}

}  // namespace oldroyd
