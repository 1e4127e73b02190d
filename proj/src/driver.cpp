#include "oldroyd/driver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "oldroyd/errors.hpp"

namespace oldroyd {

namespace {

std::string fmt_double(double v) {
  // Shortest text that round-trips.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(wi > 0.0) || !std::isfinite(wi)) fail("wi must be a positive number");
  if (!(beta > 0.0 && beta <= 1.0)) fail("beta must lie in (0, 1]");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be a positive number");
  if (!(t_end >= dt) || !std::isfinite(t_end)) fail("t-end must be at least dt");
  if (!(steady_tol > 0.0)) fail("steady-tol must be positive");
  if (!(check_threshold > 0.0)) fail("check threshold must be positive");
  if (checkpoint_every < 0) fail("checkpoint-every must be non-negative");
  if (samples < 2) fail("samples must be at least 2");
  if (workers < 1) fail("workers must be at least 1");
  if (!(initial_conformation.xx > 0.0 && initial_conformation.det() > 0.0)) {
    fail("initial conformation must be positive definite");
  }
  // Rebuilding the mesh runs its own validation.
  (void)MeshSpec::parse(mesh.to_string());
}

long SimConfig::total_steps() const { return std::lround(t_end / dt); }

std::string SimConfig::canonical_text() const {
  std::ostringstream ss;
  ss << "wi=" << fmt_double(wi) << '\n'
     << "beta=" << fmt_double(beta) << '\n'
     << "dt=" << fmt_double(dt) << '\n'
     << "t_end=" << fmt_double(t_end) << '\n'
     << "mesh=" << mesh.to_string() << '\n'
     << "lid_profile=" << to_string(lid.variant) << '\n'
     << "lid_amplitude=" << fmt_double(lid.amplitude) << '\n'
     << "lid_rate=" << fmt_double(lid.rate) << '\n'
     << "lid_center=" << fmt_double(lid.center) << '\n'
     << "initial_conformation=" << fmt_double(initial_conformation.xx) << ','
     << fmt_double(initial_conformation.xy) << ',' << fmt_double(initial_conformation.yy) << '\n'
     << "steady_tol=" << fmt_double(steady_tol) << '\n'
     << "stop_when_steady=" << (stop_when_steady ? "true" : "false") << '\n'
     << "check_threshold=" << fmt_double(check_threshold) << '\n';
  return ss.str();
}

double steady_state_residual(const SimState& prev, const SimState& curr, double dt) {
  if (prev.conf.size() != curr.conf.size() || prev.u.size() != curr.u.size()) {
    throw std::invalid_argument("steady residual: states live on different meshes");
  }
  double m = 0.0;
  for (std::size_t v = 0; v < curr.conf.size(); ++v) {
    m = std::max(m, (curr.conf[v] - prev.conf[v]).max_abs());
  }
  for (std::size_t v = 0; v < curr.u.size(); ++v) {
    m = std::max(m, max_abs(curr.u[v] - prev.u[v]));
  }
  return m / dt;
}

Simulation::Simulation(SimConfig config) : config_(std::move(config)) {
  config_.validate();
  mesh_ = std::make_shared<const Mesh>(config_.mesh.build());
  stokes_ = std::make_unique<StokesSystem>(mesh_, config_.beta);
  state_.u = VectorField(mesh_);
  state_.p = ScalarField(mesh_);
  state_.conf = ConfField(mesh_, config_.initial_conformation);
  const auto ev = sym_eigenvalues(config_.initial_conformation);
  state_.summary.min_lambda_min = ev.min;
  state_.summary.max_lambda_max = ev.max;
}

Simulation::Simulation(SimConfig config, SimState restored) : Simulation(std::move(config)) {
  const Mesh& rm = restored.conf.mesh();
  if (rm.x_coords() != mesh_->x_coords() || rm.y_coords() != mesh_->y_coords()) {
    throw FormatError("restored state was computed on a different mesh than " +
                      config_.mesh.to_string());
  }
  state_.t = restored.t;
  state_.step = restored.step;
  state_.u = VectorField(mesh_, std::move(restored.u.values()));
  state_.p = ScalarField(mesh_, std::move(restored.p.values()));
  state_.conf = ConfField(mesh_, std::move(restored.conf.values()));
  state_.summary = restored.summary;
}

bool Simulation::finished() const {
  if (state_.step >= config_.total_steps()) return true;
  return config_.stop_when_steady && state_.summary.steady_step >= 0;
}

StepDiagnostics Simulation::step() {
  const long n = state_.step + 1;
  const double t = static_cast<double>(n) * config_.dt;

  const StokesRhs rhs = assemble_rhs(*stokes_, state_.conf, config_.wi, t, config_.lid);
  StokesSolution sol = stokes_->solve(rhs);

  const auto grads = vertex_averaged_gradient(sol.u);
  const TimeStepCheck check = check_time_step(sol.u, grads, config_.dt, config_.check_threshold);
  if (!check.passed) {
    std::ostringstream msg;
    msg << "time-step check violated at step " << n << " (t = " << t << "): dt*M = "
        << check.measure << " > " << check.threshold;
    throw NumericalError(msg.str());
  }

  UpdateReport report;
  ConfField conf = conformation_update(state_.conf, sol.u, grads, {config_.wi, config_.dt},
                                       &report, config_.workers);
  const auto ext = eigen_extrema(conf);
  if (!(ext.lambda_min > 0.0)) {
    std::ostringstream msg;
    msg << "conformation tensor lost positive definiteness at step " << n << ", vertex "
        << ext.argmin << ", lambda_min = " << ext.lambda_min;
    throw NumericalError(msg.str());
  }

  SimState next;
  next.t = t;
  next.step = n;
  next.u = std::move(sol.u);
  next.p = std::move(sol.p);
  next.conf = std::move(conf);

  StepDiagnostics d;
  d.step = n;
  d.t = t;
  d.residual = steady_state_residual(state_, next, config_.dt);
  d.lambda_min = ext.lambda_min;
  d.lambda_max = ext.lambda_max;
  d.max_clamp_distance = report.max_clamp_distance;
  d.step_measure = check.measure;
  d.solver_residual = sol.stats.relative_residual;

  RunSummary s = state_.summary;
  s.min_lambda_min = std::min(s.min_lambda_min, d.lambda_min);
  s.max_lambda_max = std::max(s.max_lambda_max, d.lambda_max);
  s.max_clamp_distance = std::max(s.max_clamp_distance, d.max_clamp_distance);
  s.max_step_measure = std::max(s.max_step_measure, d.step_measure);
  s.max_solver_residual = std::max(s.max_solver_residual, d.solver_residual);
  s.last_residual = d.residual;
  if (s.steady_step < 0 && d.residual < config_.steady_tol) s.steady_step = n;
  next.summary = s;

  state_ = std::move(next);
  ring_.push_back(d);
  if (ring_.size() > ring_capacity) ring_.pop_front();
  return d;
}

void Simulation::run(const StepObserver& on_step) {
  while (!finished()) {
    const StepDiagnostics d = step();
    if (on_step) on_step(d, state_);
  }
}

RunResult run_simulation(const SimConfig& config, const Simulation::StepObserver& on_step) {
  Simulation sim(config);
  sim.run(on_step);
  RunResult out{sim.state(), {}};
  out.metrics = compute_metrics(out.state.u, out.state.conf);
  return out;
}

// Checkpoint layout (little-endian host order):
//   "OLDBCKPT" | u32 version | u32 n | i64 step | f64 t | x[n+1] | y[n+1]
//   | u[2V] | p[V] | conf[3V] | summary (6 f64, i64) | u64 FNV-1a of all prior bytes
namespace {

constexpr char kMagic[8] = {'O', 'L', 'D', 'B', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t k = 0; k < n; ++k) {
    h ^= static_cast<unsigned char>(data[k]);
    h *= 1099511628211ull;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& buf, std::size_t limit) : buf_(buf), limit_(limit) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > limit_) throw FormatError("checkpoint: file is truncated");
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t position() const { return pos_; }

 private:
  const std::string& buf_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const SimState& state, const std::string& path) {
  const Mesh& mesh = state.conf.mesh();
  Writer w;
  w.put_raw(kMagic, sizeof kMagic);
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(mesh.n()));
  w.put(static_cast<std::int64_t>(state.step));
  w.put(state.t);
  for (double x : mesh.x_coords()) w.put(x);
  for (double y : mesh.y_coords()) w.put(y);
  for (const Vec2& u : state.u.values()) {
    w.put(u.x);
    w.put(u.y);
  }
  for (double p : state.p.values()) w.put(p);
  for (const SymTensor2& s : state.conf.values()) {
    w.put(s.xx);
    w.put(s.xy);
    w.put(s.yy);
  }
  const RunSummary& s = state.summary;
  for (double v : {s.min_lambda_min, s.max_lambda_max, s.max_clamp_distance, s.max_step_measure,
                   s.max_solver_residual, s.last_residual}) {
    w.put(v);
  }
  w.put(static_cast<std::int64_t>(s.steady_step));
  w.put(fnv1a(w.buffer().data(), w.buffer().size()));

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open '" + tmp + "' for writing");
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!out) throw std::runtime_error("checkpoint: write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

SimState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("checkpoint: cannot open '" + path + "'");
  const std::string buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (buf.size() < sizeof kMagic + 4 || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError("checkpoint: '" + path + "' is not a checkpoint file (bad magic)");
  }
  if (buf.size() < sizeof(std::uint64_t)) throw FormatError("checkpoint: file is truncated");
  const std::size_t body = buf.size() - sizeof(std::uint64_t);
  Reader r(buf, body);
  for (std::size_t k = 0; k < sizeof kMagic; ++k) (void)r.get<char>();
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError("checkpoint: version " + std::to_string(version) + " not supported (expected " +
                      std::to_string(kVersion) + ")");
  }
  const auto n = r.get<std::uint32_t>();
  if (n == 0 || n > 100000) throw FormatError("checkpoint: implausible mesh size");
  const std::size_t nv = static_cast<std::size_t>(n + 1) * (n + 1);
  const std::size_t expected = sizeof kMagic + 2 * sizeof(std::uint32_t) + 2 * 8 +
                               8 * (2 * (n + 1) + 6 * nv + 6) + 8 + 8;
  if (buf.size() != expected) {
    throw FormatError("checkpoint: file size " + std::to_string(buf.size()) + " does not match " +
                      std::to_string(expected) + " (truncated or corrupt)");
  }
  std::uint64_t stored;
  std::memcpy(&stored, buf.data() + body, sizeof stored);
  if (stored != fnv1a(buf.data(), body)) throw FormatError("checkpoint: checksum mismatch");

  SimState state;
  state.step = static_cast<long>(r.get<std::int64_t>());
  state.t = r.get<double>();
  std::vector<double> x(n + 1), y(n + 1);
  for (auto& v : x) v = r.get<double>();
  for (auto& v : y) v = r.get<double>();
  auto mesh = std::make_shared<const Mesh>(std::move(x), std::move(y));
  state.u = VectorField(mesh);
  state.p = ScalarField(mesh);
  state.conf = ConfField(mesh);
  for (std::size_t v = 0; v < nv; ++v) {
    const double ux = r.get<double>();
    state.u[v] = {ux, r.get<double>()};
  }
  for (std::size_t v = 0; v < nv; ++v) state.p[v] = r.get<double>();
  for (std::size_t v = 0; v < nv; ++v) {
    const double a = r.get<double>();
    const double b = r.get<double>();
    state.conf[v] = {a, b, r.get<double>()};
  }
  RunSummary& s = state.summary;
  s.min_lambda_min = r.get<double>();
  s.max_lambda_max = r.get<double>();
  s.max_clamp_distance = r.get<double>();
  s.max_step_measure = r.get<double>();
  s.max_solver_residual = r.get<double>();
  s.last_residual = r.get<double>();
  s.steady_step = static_cast<long>(r.get<std::int64_t>());
  return state;
}

}  // namespace oldroyd
