#pragma once

#include <vector>

#include "oldroyd/fields.hpp"

namespace oldroyd {

/// Backtracked foot of the characteristic through a vertex.
struct Departure {
  Point point;      ///< clamped into the closed unit square
  Point unclamped;  ///< x - dt u(x)
  double clamp_distance = 0.0;
};

/// y = x - dt u(x), clamped componentwise into [0,1]^2.
Departure departure_point(Point x, Vec2 u_at_x, double dt);

/// F = I + dt grad u.
Tensor2 discrete_deformation_gradient(const Tensor2& grad_u, double dt);

/// Time-step admissibility: M = max over vertices of max(|u|_inf, |grad u|_max)
/// with the vertex-averaged gradient; admissible iff dt M <= threshold.
struct TimeStepCheck {
  bool passed = true;
  double measure = 0.0;  ///< dt * M
  double threshold = 0.5;
};

TimeStepCheck check_time_step(const VectorField& u, double dt, double threshold = 0.5);
TimeStepCheck check_time_step(const VectorField& u, const std::vector<Tensor2>& vertex_gradients,
                              double dt, double threshold = 0.5);

struct UpdateParams {
  double wi = 0.5;
  double dt = 1e-3;
};

/// One relaxation-deformation step at a single point:
///   (1 + dt/Wi) S_new = F S_prev F^T + (dt/Wi) I.
SymTensor2 relax_and_deform(const Tensor2& f, const SymTensor2& prev, const UpdateParams& params);

struct UpdateReport {
  double max_clamp_distance = 0.0;
  std::size_t max_clamp_vertex = 0;
};

/// Semi-Lagrangian update of the conformation field for one time step.
///
/// At each vertex x_i: F from the patch-averaged velocity gradient at x_i, the
/// departure point from the nodal velocity, S_prev evaluated there by bilinear
/// interpolation, then relax_and_deform. Vertices are independent, so the
/// work is split over `workers` threads with identical results for any count.
///
/// Throws NumericalError if `prev` has a vertex with lambda_min <= 0.
ConfField conformation_update(const ConfField& prev, const VectorField& u,
                              const UpdateParams& params, UpdateReport* report = nullptr,
                              int workers = 1);

/// Same, with precomputed vertex gradients (the driver reuses them from the
/// time-step check).
ConfField conformation_update(const ConfField& prev, const VectorField& u,
                              const std::vector<Tensor2>& vertex_gradients,
                              const UpdateParams& params, UpdateReport* report = nullptr,
                              int workers = 1);

/// Throws NumericalError naming the first vertex with lambda_min <= 0.
void require_positive_definite(const ConfField& conf, const char* context);

}  // namespace oldroyd
