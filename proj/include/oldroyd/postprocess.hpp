#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "oldroyd/fields.hpp"

namespace oldroyd {

/// horizontal: the line y = coordinate, arc coordinate s = x.
/// vertical:   the line x = coordinate, arc coordinate s = y.
enum class Axis { horizontal, vertical };

struct CrossSection {
  Axis axis = Axis::horizontal;
  double coordinate = 0.0;
  std::vector<double> s;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  ///< columns[c][k] at s[k]

  void write_csv(std::ostream& out) const;
};

/// n_samples equispaced points s_k = k / (n_samples - 1) on the line.
/// Throws std::invalid_argument for a coordinate outside [0, 1] or n_samples < 2.
std::vector<Point> cross_section_points(Axis axis, double coordinate, int n_samples);

CrossSection sample_cross_section(const ScalarField& f, Axis axis, double coordinate,
                                  int n_samples, const std::string& name = "value");
CrossSection sample_cross_section(const VectorField& f, Axis axis, double coordinate,
                                  int n_samples);
CrossSection sample_cross_section(const ConfField& f, Axis axis, double coordinate,
                                  int n_samples);

/// ln of the maximum of s11 along x = 0.5: dense sampling followed by a
/// golden-section refinement around the sampled maximum.
double midline_max_log_sigma11(const ConfField& conf, int n_samples = 4096);

/// Nodal maximum of s11 (bilinear interpolants attain extrema at vertices).
double global_max_sigma11(const ConfField& conf);

struct VortexCenter {
  Point center;
  bool converged = false;
  double speed = 0.0;  ///< |u| at the returned point
  int iterations = 0;
};

/// Centre of the primary vortex: a scan for the point minimising |u| / |curl u|
/// among rotation-dominated points away from the side and bottom walls,
/// followed by damped Newton on the interpolated velocity with the elementwise
/// bilinear Jacobian. Falls back to the scan point with converged = false.
VortexCenter vortex_center(const VectorField& u, int scan = 200);

std::pair<ScalarField, ScalarField> eigenvalue_fields(const ConfField& conf);

struct Metrics {
  double max_ln_s11_midline = 0.0;
  double max_s11_global = 0.0;
  Point vortex_center;
  bool vortex_converged = false;
  double lambda_min_global = 0.0;
  double lambda_max_global = 0.0;
};

Metrics compute_metrics(const VectorField& u, const ConfField& conf);

}  // namespace oldroyd
