#include "oldroyd/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "oldroyd/errors.hpp"

namespace oldroyd {

void CrossSection::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "s";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t k = 0; k < s.size(); ++k) {
    out << s[k];
    for (const auto& col : columns) out << ',' << col[k];
    out << '\n';
  }
  out.precision(old_precision);
}

std::vector<Point> cross_section_points(Axis axis, double coordinate, int n_samples) {
  if (!(coordinate >= 0.0 && coordinate <= 1.0)) {
    throw std::invalid_argument("cross section: line coordinate must lie in [0, 1]");
  }
  if (n_samples < 2) throw std::invalid_argument("cross section: need at least 2 samples");
  std::vector<Point> pts(static_cast<std::size_t>(n_samples));
  const double denom = n_samples - 1;
  for (int k = 0; k < n_samples; ++k) {
    const double s = k / denom;
    pts[k] = axis == Axis::horizontal ? Point{s, coordinate} : Point{coordinate, s};
  }
  return pts;
}

namespace {

template <typename Field, typename Columns>
CrossSection sample(const Field& f, Axis axis, double coordinate, int n_samples,
                    std::vector<std::string> names, Columns&& split) {
  CrossSection cs;
  cs.axis = axis;
  cs.coordinate = coordinate;
  cs.names = std::move(names);
  cs.columns.assign(cs.names.size(), {});
  for (const Point p : cross_section_points(axis, coordinate, n_samples)) {
    cs.s.push_back(axis == Axis::horizontal ? p.x : p.y);
    split(f(p), cs.columns);
  }
  return cs;
}

}  // namespace

CrossSection sample_cross_section(const ScalarField& f, Axis axis, double coordinate,
                                  int n_samples, const std::string& name) {
  return sample(f, axis, coordinate, n_samples, {name},
                [](double v, auto& cols) { cols[0].push_back(v); });
}

CrossSection sample_cross_section(const VectorField& f, Axis axis, double coordinate,
                                  int n_samples) {
  return sample(f, axis, coordinate, n_samples, {"u1", "u2"}, [](Vec2 v, auto& cols) {
    cols[0].push_back(v.x);
    cols[1].push_back(v.y);
  });
}

CrossSection sample_cross_section(const ConfField& f, Axis axis, double coordinate,
                                  int n_samples) {
  return sample(f, axis, coordinate, n_samples, {"s11", "s12", "s22"},
                [](const SymTensor2& v, auto& cols) {
                  cols[0].push_back(v.xx);
                  cols[1].push_back(v.xy);
                  cols[2].push_back(v.yy);
                });
}

double midline_max_log_sigma11(const ConfField& conf, int n_samples) {
  const auto pts = cross_section_points(Axis::vertical, 0.5, n_samples);
  auto s11 = [&conf](double y) { return conf({0.5, y}).xx; };

  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double v = s11(pts[k].y);
    if (!(v > 0.0)) {
      throw NumericalError("midline max: non-positive s11 at y = " + std::to_string(pts[k].y));
    }
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }

  // Golden-section search on the bracketing sample interval.
  double a = pts[best == 0 ? 0 : best - 1].y;
  double b = pts[std::min(best + 1, pts.size() - 1)].y;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = s11(c), fd = s11(d);
  for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = s11(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = s11(d);
    }
  }
  best_value = std::max({best_value, fc, fd});
  return std::log(best_value);
}

double global_max_sigma11(const ConfField& conf) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : conf.values()) m = std::max(m, s.xx);
  return m;
}

namespace {

struct LocalLinearisation {
  Vec2 u;
  Tensor2 jacobian;
};

LocalLinearisation linearise(const VectorField& u, Point p) {
  const LocatedPoint lp = u.mesh().locate(p);
  return {u(p), element_gradient(u, lp.element, lp.local)};
}

}  // namespace

VortexCenter vortex_center(const VectorField& u, int scan) {
  // Corner eddies near the bottom and side walls are excluded from the scan;
  // the primary vortex of a lid-driven cavity sits well inside this box.
  constexpr double wall_margin = 0.1;
  constexpr double lid_margin = 0.02;

  VortexCenter out;
  double best_score = std::numeric_limits<double>::infinity();
  Point best{0.5, 0.5};
  for (int jy = 0; jy < scan; ++jy) {
    const double y = wall_margin + (1.0 - lid_margin - wall_margin) * (jy + 0.5) / scan;
    for (int ix = 0; ix < scan; ++ix) {
      const double x = wall_margin + (1.0 - 2.0 * wall_margin) * (ix + 0.5) / scan;
      const auto lin = linearise(u, {x, y});
      if (!(lin.jacobian.det() > 0.0)) continue;
      const double vorticity = std::abs(lin.jacobian.yx - lin.jacobian.xy);
      if (vorticity == 0.0) continue;
      const double score = norm(lin.u) / vorticity;
      if (score < best_score) {
        best_score = score;
        best = {x, y};
      }
    }
  }

  Point p = best;
  double speed = norm(u(p));
  int it = 0;
  for (; it < 100 && speed > 1e-13; ++it) {
    const auto lin = linearise(u, p);
    const double det = lin.jacobian.det();
    if (det == 0.0) break;
    const Vec2 step{(lin.jacobian.yy * lin.u.x - lin.jacobian.xy * lin.u.y) / det,
                    (-lin.jacobian.yx * lin.u.x + lin.jacobian.xx * lin.u.y) / det};
    double damping = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k) {
      Point trial = p - damping * step;
      trial = {std::clamp(trial.x, 0.0, 1.0), std::clamp(trial.y, 0.0, 1.0)};
      const double s = norm(u(trial));
      if (s < speed) {
        p = trial;
        speed = s;
        accepted = true;
        break;
      }
      damping *= 0.5;
    }
    if (!accepted) break;
  }

  out.center = p;
  out.speed = speed;
  out.iterations = it;
  out.converged = speed < 1e-8;
  if (!out.converged) {
    out.center = best;
    out.speed = norm(u(best));
  }
  return out;
}

std::pair<ScalarField, ScalarField> eigenvalue_fields(const ConfField& conf) {
  ScalarField lo(conf.mesh_ptr()), hi(conf.mesh_ptr());
  for (std::size_t v = 0; v < conf.size(); ++v) {
    const auto ev = sym_eigenvalues(conf[v]);
    lo[v] = ev.min;
    hi[v] = ev.max;
  }
  return {std::move(lo), std::move(hi)};
}

Metrics compute_metrics(const VectorField& u, const ConfField& conf) {
  Metrics m;
  m.max_ln_s11_midline = midline_max_log_sigma11(conf);
  m.max_s11_global = global_max_sigma11(conf);
  const auto vc = vortex_center(u);
  m.vortex_center = vc.center;
  m.vortex_converged = vc.converged;
  const auto ext = eigen_extrema(conf);
  m.lambda_min_global = ext.lambda_min;
  m.lambda_max_global = ext.lambda_max;
  return m;
}

}  // namespace oldroyd
