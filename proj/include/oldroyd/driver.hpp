#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>

#include "oldroyd/constitutive.hpp"
#include "oldroyd/fields.hpp"
#include "oldroyd/mesh.hpp"
#include "oldroyd/postprocess.hpp"
#include "oldroyd/stokes.hpp"

namespace oldroyd {

/// Run parameters. Re = 0 throughout.
struct SimConfig {
  double wi = 0.5;
  double beta = 0.5;
  double dt = 1e-3;
  double t_end = 10.0;
  MeshSpec mesh{};
  LidProfile lid{};
  /// Spatially uniform initial conformation; the identity is the stress-free state.
  SymTensor2 initial_conformation = SymTensor2::identity();
  double steady_tol = 1e-6;
  bool stop_when_steady = false;
  double check_threshold = 0.5;
  std::string output_dir = "oldroyd_out";
  long checkpoint_every = 0;  ///< steps between checkpoints, 0 = never
  int samples = 1001;         ///< points per exported cross-section
  int workers = 1;

  /// Throws std::invalid_argument naming the offending parameter.
  void validate() const;
  long total_steps() const;
  /// Canonical key=value listing of the physics-relevant parameters.
  std::string canonical_text() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct StepDiagnostics {
  long step = 0;
  double t = 0.0;
  double residual = 0.0;  ///< steady-state residual
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double max_clamp_distance = 0.0;
  double step_measure = 0.0;  ///< dt * M from the time-step check
  double solver_residual = 0.0;
};

/// Running extrema over all accepted steps.
struct RunSummary {
  double min_lambda_min = 0.0;
  double max_lambda_max = 0.0;
  double max_clamp_distance = 0.0;
  double max_step_measure = 0.0;
  double max_solver_residual = 0.0;
  double last_residual = 0.0;
  long steady_step = -1;  ///< first step with residual below steady_tol

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct SimState {
  double t = 0.0;
  long step = 0;
  VectorField u;
  ScalarField p;
  ConfField conf;
  RunSummary summary;
};

/// max(|conf_n - conf_{n-1}|_inf, |u_n - u_{n-1}|_inf) / dt.
double steady_state_residual(const SimState& prev, const SimState& curr, double dt);

/// Decoupled time loop: at step n, solve Stokes forced by conf^{n-1} with the
/// lid at t = n dt, check the time step against the new velocity, then update
/// the conformation tensor. The Stokes operator is factorised once.
class Simulation {
 public:
  explicit Simulation(SimConfig config);
  /// Continue from a restored state; its mesh must match config.mesh.
  Simulation(SimConfig config, SimState restored);

  const SimConfig& config() const { return config_; }
  const SimState& state() const { return state_; }
  const StokesSystem& stokes() const { return *stokes_; }
  const std::deque<StepDiagnostics>& recent() const { return ring_; }

  bool finished() const;

  /// Advances one step. Throws NumericalError on a time-step violation,
  /// loss of positive definiteness or solver failure; the state is unchanged
  /// in that case.
  StepDiagnostics step();

  using StepObserver = std::function<void(const StepDiagnostics&, const SimState&)>;
  void run(const StepObserver& on_step = {});

  static constexpr std::size_t ring_capacity = 256;

 private:
  SimConfig config_;
  MeshPtr mesh_;
  std::unique_ptr<StokesSystem> stokes_;
  SimState state_;
  std::deque<StepDiagnostics> ring_;
};

struct RunResult {
  SimState state;
  Metrics metrics;
};

RunResult run_simulation(const SimConfig& config, const Simulation::StepObserver& on_step = {});

/// Binary checkpoint, versioned and checksummed. Written atomically (temp file
/// + rename).
void save_checkpoint(const SimState& state, const std::string& path);
/// Throws FormatError on a bad magic, version mismatch, truncation or checksum failure.
SimState load_checkpoint(const std::string& path);

}  // namespace oldroyd
