#pragma once

// Oracles shared by the unit tests and the acceptance runner.

#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/Dense>

#include "oldroyd/constitutive.hpp"
#include "oldroyd/stokes.hpp"

namespace oldroyd::testing {

inline MeshPtr share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

// Divergence-free velocity vanishing on the boundary, with a mean-zero pressure.
inline Vec2 mms_velocity(Point p) {
  constexpr double pi = std::numbers::pi;
  const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
  return {sx * sx * std::sin(2 * pi * p.y), -std::sin(2 * pi * p.x) * sy * sy};
}

inline double mms_pressure(Point p) {
  constexpr double pi = std::numbers::pi;
  return std::cos(pi * p.x) * std::cos(pi * p.y);
}

// f = -beta lap u + grad p
inline Vec2 mms_force(Point p, double beta) {
  constexpr double pi = std::numbers::pi;
  const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
  const double s2x = std::sin(2 * pi * p.x), s2y = std::sin(2 * pi * p.y);
  const double lap1 = 2 * pi * pi * std::cos(2 * pi * p.x) * s2y - 4 * pi * pi * sx * sx * s2y;
  const double lap2 = 4 * pi * pi * s2x * sy * sy - 2 * pi * pi * s2x * std::cos(2 * pi * p.y);
  const Vec2 gp{-pi * std::sin(pi * p.x) * std::cos(pi * p.y), -pi * std::cos(pi * p.x) * std::sin(pi * p.y)};
  return {-beta * lap1 + gp.x, -beta * lap2 + gp.y};
}

struct L2Errors {
  double velocity = 0.0;
  double pressure = 0.0;
};

// 3x3 Gauss per element.
inline L2Errors mms_errors(const StokesSolution& sol) {
  const Mesh& m = sol.u.mesh();
  const double q[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
  const double w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  double eu = 0.0, ep = 0.0;
  for (int j = 0; j < m.n(); ++j) {
    for (int i = 0; i < m.n(); ++i) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const Point p{m.x_coords()[i] + q[a] * m.dx(i), m.y_coords()[j] + q[b] * m.dy(j)};
          const double wt = w[a] * w[b] * m.dx(i) * m.dy(j);
          const Vec2 du = eval_vector(sol.u, p) - mms_velocity(p);
          eu += wt * (du.x * du.x + du.y * du.y);
          const double dp = eval_scalar(sol.p, p) - mms_pressure(p);
          ep += wt * dp * dp;
        }
      }
    }
  }
  return {std::sqrt(eu), std::sqrt(ep)};
}

inline L2Errors solve_mms(int n, double beta) {
  const StokesSystem sys(share(Mesh::uniform(n)), beta);
  const StokesRhs rhs{assemble_body_force(sys, [beta](Point p) { return mms_force(p, beta); }),
                      std::vector<Vec2>(sys.mesh().num_vertices())};
  return mms_errors(sys.solve(rhs));
}

// Steady state of G S + S G^T - (S - I)/Wi = 0 for a constant gradient G, as
// a 3x3 linear system in (s11, s12, s22).
inline SymTensor2 analytic_steady_state(const Tensor2& g, double wi) {
  Eigen::Matrix3d a;
  a << 2 * g.xx - 1 / wi, 2 * g.xy, 0,
       g.yx, g.xx + g.yy - 1 / wi, g.xy,
       0, 2 * g.yx, 2 * g.yy - 1 / wi;
  const Eigen::Vector3d b(-1 / wi, 0, -1 / wi);
  const Eigen::Vector3d s = a.fullPivLu().solve(b);
  return {s[0], s[1], s[2]};
}

// Repeats the field update under u = (gamma y, 0) until it stops changing;
// returns the value at the centre vertex.
inline SymTensor2 discrete_shear_steady_state(double wi, double dt, double gamma) {
  const auto mesh = share(Mesh::uniform(2));
  const auto u = VectorField::interpolate(mesh, [gamma](Point p) { return Vec2{gamma * p.y, 0.0}; });
  const auto grads = vertex_averaged_gradient(u);
  ConfField conf(mesh, SymTensor2::identity());
  for (int k = 0; k < 500000; ++k) {
    ConfField next = conformation_update(conf, u, grads, {wi, dt});
    const double change = (next[4] - conf[4]).max_abs();
    conf = std::move(next);
    if (change < 1e-15) break;
  }
  return conf[4];
}

inline Tensor2 rotation(double theta) {
  return {std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)};
}

// A random SPD field with eigenvalues spanning six decades, and a random
// velocity scaled so that dt * M = target. Returns the updated field's lambda_min.
template <typename Rng>
double random_positivity_trial(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> half(1, 6);
  const bool ratio = unit(rng) < 0.5;
  const auto mesh = ratio ? share(Mesh::ratio_graded(2 * half(rng), 0.5 + 0.49 * unit(rng)))
                          : share(Mesh::quadratic_graded(2 * half(rng)));
  ConfField conf(mesh);
  for (std::size_t v = 0; v < conf.size(); ++v) {
    const double l1 = std::pow(10.0, -3.0 + 6.0 * unit(rng));
    const double l2 = std::pow(10.0, -3.0 + 6.0 * unit(rng));
    conf[v] = congruence(rotation(6.283185307179586 * unit(rng)), SymTensor2{l1, 0.0, l2});
  }
  VectorField u(mesh);
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = {2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0};
  const double dt = 1e-3 + 0.1 * unit(rng);
  const double scale = 0.5 * unit(rng) / check_time_step(u, dt).measure;
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = scale * u[v];
  if (!check_time_step(u, dt).passed) return -1.0;
  return eigen_extrema(conformation_update(conf, u, {0.05 + 2.0 * unit(rng), dt})).lambda_min;
}

}  // namespace oldroyd::testing
