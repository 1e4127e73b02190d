// Acceptance runner: one PASS / FAIL / SKIP line per criterion, exit status 1
// if any gating criterion fails. Progress goes to stderr.
//
// The long Wi = 1 run (criterion 4) is advisory and only runs when
// OLDROYD_ACCEPT_LONG=1 is set.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oldroyd/cli.hpp"
#include "oldroyd/io.hpp"
#include "support.hpp"

using namespace oldroyd;
using namespace oldroyd::testing;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kC1LnTarget = 5.76, kC1LnRelTol = 0.03;
constexpr double kC1MaxTarget = 351.21, kC1MaxRelTol = 0.10;
constexpr double kC1Xc = 0.466, kC1Yc = 0.799, kC1CenterTol = 0.01;
constexpr double kC2Targets[3] = {5.76, 5.65, 5.60};
constexpr double kC2RelTol = 0.03;
constexpr double kC4LnTarget = 10.22, kC4LnRelTol = 0.10;
constexpr double kC4Xc = 0.431, kC4Yc = 0.819, kC4CenterTol = 0.015;
constexpr int kC5Trials = 1000;
constexpr double kC6Tol = 1e-13;
constexpr int kC6Steps = 100;
constexpr double kC7OrderLo = 0.8, kC7OrderHi = 1.2;
constexpr double kC8VelOrderLo = 1.8, kC8VelOrderHi = 2.2, kC8PresOrderLo = 0.9;
constexpr double kC8VortexTol = 0.005;
constexpr double kC9ClampFactor = 2.0;

struct Outcome {
  std::string status;  // PASS, FAIL or SKIP
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within_rel(double value, double target, double tol) { return std::abs(value - target) <= tol * std::abs(target); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path work_dir() {
  if (const char* d = std::getenv("OLDROYD_ACCEPT_DIR")) return d;
  return fs::temp_directory_path() / "oldroyd_acceptance";
}

SimConfig benchmark_config(const std::string& mesh, double wi, double t_end, const std::string& dir) {
  SimConfig c;
  c.wi = wi;
  c.beta = 0.5;
  c.dt = 1e-3;
  c.t_end = t_end;
  c.mesh = MeshSpec::parse(mesh);
  c.output_dir = (work_dir() / dir).string();
  return c;
}

struct BenchRun {
  bool ok = false;
  std::string error;
  RunResult result;
};

BenchRun run_benchmark(const SimConfig& c) {
  std::cerr << "[acceptance] running " << c.mesh.to_string() << " Wi=" << c.wi << " to t=" << c.t_end
            << " (workers " << c.workers << ")\n";
  const auto t0 = std::chrono::steady_clock::now();
  BenchRun r;
  std::ostringstream sink;
  try {
    r.result = run_to_directory(c, std::nullopt, sink);
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  std::cerr << "[acceptance]   done in " << fmt("%.0f", seconds_since(t0)) << " s\n";
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion1(const BenchRun& r) {
  if (!r.ok) return {"FAIL", "run failed: " + r.error};
  const Metrics& m = r.result.metrics;
  const bool ln_ok = within_rel(m.max_ln_s11_midline, kC1LnTarget, kC1LnRelTol);
  const bool max_ok = within_rel(m.max_s11_global, kC1MaxTarget, kC1MaxRelTol);
  const bool c_ok = std::abs(m.vortex_center.x - kC1Xc) <= kC1CenterTol &&
                    std::abs(m.vortex_center.y - kC1Yc) <= kC1CenterTol;
  std::ostringstream d;
  d << "max ln s11(x=0.5) = " << fmt("%.4f", m.max_ln_s11_midline) << " (5.76 +-3%), max s11 = "
    << fmt("%.2f", m.max_s11_global) << " (351.21 +-10%), centre = (" << fmt("%.4f", m.vortex_center.x) << ", "
    << fmt("%.4f", m.vortex_center.y) << ") (0.466, 0.799 +-0.01)";
  return {ln_ok && max_ok && c_ok ? "PASS" : "FAIL", d.str()};
}

Outcome criterion2(const BenchRun* runs[3]) {
  std::ostringstream d;
  bool ok = true;
  double prev = INFINITY;
  const char* names[3] = {"T90", "T120", "T150"};
  for (int k = 0; k < 3; ++k) {
    if (!runs[k]->ok) return {"FAIL", std::string(names[k]) + " failed: " + runs[k]->error};
    const double v = runs[k]->result.metrics.max_ln_s11_midline;
    ok = ok && within_rel(v, kC2Targets[k], kC2RelTol) && v < prev;
    prev = v;
    d << (k ? ", " : "") << names[k] << " " << fmt("%.4f", v) << " (" << fmt("%.2f", kC2Targets[k]) << ")";
  }
  d << "; must decrease and stay within 3%";
  return {ok ? "PASS" : "FAIL", d.str()};
}

Outcome criterion3() {
  struct Row {
    const char* mesh;
    std::size_t elements;
    const char* h_min;
    const char* h_max;
    int min_digits;  // significant figures printed in the table
  };
  const Row rows[] = {{"ratio:90", 8100, "0.0039", "0.024", 2},   {"ratio:120", 14400, "0.0020", "0.022", 2},
                      {"ratio:150", 22500, "0.0010", "0.021", 2}, {"ratio:180", 32400, "0.00054", "0.021", 2},
                      {"quadratic:256", 65536, "1.5e-05", "0.0078", 2}};
  bool ok = true;
  std::ostringstream d;
  for (const Row& r : rows) {
    const auto st = MeshSpec::parse(r.mesh).build().statistics();
    auto round_sig = [](double v, int sig) {
      const double scale = std::pow(10.0, sig - 1 - std::floor(std::log10(v)));
      return std::round(v * scale) / scale;
    };
    const bool row_ok = st.n_elements == r.elements && round_sig(st.h_min, r.min_digits) == std::stod(r.h_min) &&
                        round_sig(st.h_max, r.min_digits) == std::stod(r.h_max);
    ok = ok && row_ok;
    d << r.mesh << (row_ok ? " ok" : " MISMATCH") << " (" << st.n_elements << ", " << fmt("%.3g", st.h_min) << ", "
      << fmt("%.3g", st.h_max) << ") ";
  }
  return {ok ? "PASS" : "FAIL", d.str()};
}

Outcome criterion4() {
  const char* flag = std::getenv("OLDROYD_ACCEPT_LONG");
  if (!flag || std::string(flag) != "1") {
    return {"SKIP", "advisory Wi=1 run on R256 to t=30; set OLDROYD_ACCEPT_LONG=1 to run it"};
  }
  const BenchRun r = run_benchmark(benchmark_config("quadratic:256", 1.0, 30.0, "c4_r256"));
  if (!r.ok) return {"FAIL", "(advisory) run failed: " + r.error};
  const Metrics& m = r.result.metrics;
  const bool ok = within_rel(m.max_ln_s11_midline, kC4LnTarget, kC4LnRelTol) &&
                  std::abs(m.vortex_center.x - kC4Xc) <= kC4CenterTol &&
                  std::abs(m.vortex_center.y - kC4Yc) <= kC4CenterTol;
  return {ok ? "PASS" : "FAIL", "(advisory) max ln s11 = " + fmt("%.4f", m.max_ln_s11_midline) +
                                    " (10.22 +-10%), centre = (" + fmt("%.4f", m.vortex_center.x) + ", " +
                                    fmt("%.4f", m.vortex_center.y) + ") (0.431, 0.819 +-0.015)"};
}

Outcome criterion5(const BenchRun& r) {
  std::mt19937_64 rng(20240501);
  int failures = 0;
  double worst = INFINITY;
  for (int k = 0; k < kC5Trials; ++k) {
    const double lmin = random_positivity_trial(rng);
    worst = std::min(worst, lmin);
    if (!(lmin > 0.0)) ++failures;
  }
  std::ostringstream d;
  d << kC5Trials << " random trials, smallest output lambda_min " << fmt("%.3e", worst) << ", " << failures
    << " failures; ";
  if (!r.ok) return {"FAIL", d.str() + "criterion-1 run failed: " + r.error};
  const double run_min = r.result.state.summary.min_lambda_min;
  d << "criterion-1 run min over steps of lambda_min " << fmt("%.6f", run_min);
  return {failures == 0 && run_min > 0.0 ? "PASS" : "FAIL", d.str()};
}

Outcome criterion6() {
  SimConfig c;
  c.mesh = MeshSpec::parse("ratio:20");
  c.lid.amplitude = 0.0;
  c.wi = 0.5;
  c.dt = 0.01;
  c.t_end = kC6Steps * c.dt;
  const SymTensor2 s0{3.0, 0.7, 2.0};
  c.initial_conformation = s0;
  Simulation sim(c);
  double worst = 0.0;
  for (int n = 1; n <= kC6Steps; ++n) {
    sim.step();
    const double decay = std::pow(1.0 + c.dt / c.wi, -n);
    const SymTensor2 expected = SymTensor2::identity() + decay * (s0 - SymTensor2::identity());
    for (const auto& s : sim.state().conf.values()) worst = std::max(worst, (s - expected).max_abs());
  }
  return {worst <= kC6Tol ? "PASS" : "FAIL",
          "max deviation from (1+dt/Wi)^-n (S0 - I) over " + std::to_string(kC6Steps) + " steps: " +
              fmt("%.2e", worst) + " (tol 1e-13)"};
}

Outcome criterion7() {
  bool ok = true;
  std::ostringstream d;
  for (double wi : {0.1, 0.5}) {
    const SymTensor2 exact{1.0 + 2.0 * wi * wi, wi, 1.0};
    const SymTensor2 oracle = analytic_steady_state({0.0, 1.0, 0.0, 0.0}, wi);
    ok = ok && (oracle - exact).max_abs() < 1e-12;
    std::vector<double> err;
    for (double dt : {4e-2, 2e-2, 1e-2, 5e-3}) err.push_back((discrete_shear_steady_state(wi, dt, 1.0) - exact).max_abs());
    d << "Wi=" << wi << " orders";
    for (std::size_t k = 1; k < err.size(); ++k) {
      const double order = std::log2(err[k - 1] / err[k]);
      ok = ok && order >= kC7OrderLo && order <= kC7OrderHi;
      d << ' ' << fmt("%.3f", order);
    }
    d << " (error at dt=5e-3: " << fmt("%.2e", err.back()) << "); ";
  }
  return {ok ? "PASS" : "FAIL", d.str()};
}

Outcome criterion8() {
  bool ok = true;
  std::ostringstream d;
  std::vector<L2Errors> e;
  for (int n : {8, 16, 32, 64, 128}) e.push_back(solve_mms(n, 0.5));
  d << "velocity orders";
  for (std::size_t k = 1; k < e.size(); ++k) {
    const double o = std::log2(e[k - 1].velocity / e[k].velocity);
    ok = ok && o >= kC8VelOrderLo && o <= kC8VelOrderHi;
    d << ' ' << fmt("%.3f", o);
  }
  d << ", pressure orders";
  for (std::size_t k = 1; k < e.size(); ++k) {
    const double o = std::log2(e[k - 1].pressure / e[k].pressure);
    ok = ok && o >= kC8PresOrderLo;
    d << ' ' << fmt("%.3f", o);
  }
  const StokesSystem sys(share(Mesh::ratio_graded(90, 0.96)), 1.0);
  const auto sol = sys.solve(assemble_rhs(sys, ConfField(sys.mesh_ptr(), SymTensor2::identity()), 0.5, 10.0, {}));
  const VortexCenter vc = vortex_center(sol.u);
  ok = ok && vc.converged && std::abs(vc.center.x - 0.5) <= kC8VortexTol;
  d << "; Newtonian T90 vortex x_c = " << fmt("%.5f", vc.center.x);
  return {ok ? "PASS" : "FAIL", d.str()};
}

Outcome criterion9(const BenchRun& r) {
  if (!r.ok) return {"FAIL", "criterion-1 run failed: " + r.error};
  const Mesh mesh = r.result.state.conf.mesh();
  // Smallest edge of the element row under the lid.
  double h = mesh.dy(mesh.n() - 1);
  for (int i = 0; i < mesh.n(); ++i) h = std::min(h, mesh.dx(i));
  const RunSummary& s = r.result.state.summary;
  const bool ok = s.max_clamp_distance < kC9ClampFactor * h && s.max_step_measure <= 0.5;
  return {ok ? "PASS" : "FAIL", "max clamp distance " + fmt("%.3e", s.max_clamp_distance) + " < 2 h_min(lid row) = " +
                                    fmt("%.3e", 2 * h) + "; max dt*M " + fmt("%.4f", s.max_step_measure) + " <= 0.5"};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(work_dir());

  const SimConfig c1 = benchmark_config("ratio:90", 0.5, 10.0, "c1_t90");
  SimConfig c10 = c1;
  c10.output_dir = (work_dir() / "c10_t90_workers4").string();
  c10.workers = 4;

  std::map<int, Outcome> out;
  out[3] = criterion3();
  out[6] = criterion6();
  out[7] = criterion7();
  out[8] = criterion8();

  const BenchRun t90 = run_benchmark(c1);
  out[1] = criterion1(t90);
  out[5] = criterion5(t90);
  out[9] = criterion9(t90);

  const BenchRun t90b = run_benchmark(c10);
  if (!t90.ok || !t90b.ok) {
    out[10] = {"FAIL", "a run failed: " + t90.error + " " + t90b.error};
  } else {
    const std::string ma = slurp(fs::path(c1.output_dir) / "metrics.json");
    const std::string mb = slurp(fs::path(c10.output_dir) / "metrics.json");
    const bool same = !ma.empty() && ma == mb;
    out[10] = {same ? "PASS" : "FAIL", std::string("metrics.json from workers=1 and workers=4 runs are ") +
                                           (same ? "byte-identical" : "DIFFERENT") + " (sha256 " +
                                           sha256_hex(ma).substr(0, 16) + " / " + sha256_hex(mb).substr(0, 16) + ")"};
  }

  const BenchRun t120 = run_benchmark(benchmark_config("ratio:120", 0.5, 10.0, "c2_t120"));
  const BenchRun t150 = run_benchmark(benchmark_config("ratio:150", 0.5, 10.0, "c2_t150"));
  const BenchRun* trend[3] = {&t90, &t120, &t150};
  out[2] = criterion2(trend);

  out[4] = criterion4();

  bool failed = false;
  for (const auto& [k, o] : out) {
    std::cout << o.status << " criterion " << k << ": " << o.detail << '\n';
    failed = failed || o.status == "FAIL";
  }
  std::cout << "acceptance finished in " << fmt("%.0f", seconds_since(t0)) << " s\n";
  return failed ? 1 : 0;
}
