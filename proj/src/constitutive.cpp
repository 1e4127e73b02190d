#include "oldroyd/constitutive.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

#include "oldroyd/errors.hpp"
#include "oldroyd/parallel.hpp"

namespace oldroyd {

Departure departure_point(Point x, Vec2 u_at_x, double dt) {
  Departure d;
  d.unclamped = x - dt * u_at_x;
  d.point = {std::clamp(d.unclamped.x, 0.0, 1.0), std::clamp(d.unclamped.y, 0.0, 1.0)};
  d.clamp_distance = norm(d.unclamped - d.point);
  return d;
}

Tensor2 discrete_deformation_gradient(const Tensor2& grad_u, double dt) {
  return Tensor2::identity() + dt * grad_u;
}

TimeStepCheck check_time_step(const VectorField& u, double dt, double threshold) {
  return check_time_step(u, vertex_averaged_gradient(u), dt, threshold);
}

TimeStepCheck check_time_step(const VectorField& u, const std::vector<Tensor2>& vertex_gradients,
                              double dt, double threshold) {
  double m = 0.0;
  for (std::size_t v = 0; v < u.size(); ++v) {
    m = std::max({m, max_abs(u[v]), vertex_gradients[v].max_abs()});
  }
  TimeStepCheck check;
  check.threshold = threshold;
  check.measure = dt * m;
  check.passed = check.measure <= threshold;
  return check;
}

SymTensor2 relax_and_deform(const Tensor2& f, const SymTensor2& prev, const UpdateParams& params) {
  const double r = params.dt / params.wi;
  const SymTensor2 pushed = congruence(f, prev);
  // Divide rather than multiply by a reciprocal so that I stays exactly I.
  const double d = 1.0 + r;
  return {(pushed.xx + r) / d, pushed.xy / d, (pushed.yy + r) / d};
}

void require_positive_definite(const ConfField& conf, const char* context) {
  for (std::size_t v = 0; v < conf.size(); ++v) {
    const auto ev = sym_eigenvalues(conf[v]);
    if (!(ev.min > 0.0)) {
      const Point x = conf.mesh().vertex(v);
      std::ostringstream msg;
      msg << context << ": conformation tensor not positive definite at vertex " << v << " ("
          << x.x << ", " << x.y << "), lambda_min = " << ev.min;
      throw NumericalError(msg.str());
    }
  }
}

ConfField conformation_update(const ConfField& prev, const VectorField& u,
                              const UpdateParams& params, UpdateReport* report, int workers) {
  return conformation_update(prev, u, vertex_averaged_gradient(u), params, report, workers);
}

ConfField conformation_update(const ConfField& prev, const VectorField& u,
                              const std::vector<Tensor2>& vertex_gradients,
                              const UpdateParams& params, UpdateReport* report, int workers) {
  if (!(params.wi > 0.0) || !(params.dt > 0.0)) {
    throw std::invalid_argument("conformation update: Wi and dt must be positive");
  }
  if (prev.size() != u.size() || vertex_gradients.size() != u.size()) {
    throw std::invalid_argument("conformation update: field sizes do not match");
  }
  require_positive_definite(prev, "conformation update");

  const Mesh& mesh = prev.mesh();
  ConfField next(prev.mesh_ptr());
  std::vector<double> clamp(prev.size(), 0.0);

  parallel_for(prev.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const Departure dep = departure_point(mesh.vertex(v), u[v], params.dt);
      const Tensor2 f = discrete_deformation_gradient(vertex_gradients[v], params.dt);
      next[v] = relax_and_deform(f, prev(dep.point), params);
      clamp[v] = dep.clamp_distance;
    }
  });

  if (report) {
    const auto it = std::max_element(clamp.begin(), clamp.end());
    report->max_clamp_distance = *it;
    report->max_clamp_vertex = static_cast<std::size_t>(std::distance(clamp.begin(), it));
  }
  return next;
}

}  // namespace oldroyd
