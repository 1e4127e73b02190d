#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "oldroyd/tensor.hpp"

namespace oldroyd {

/// Element index (i along x, j along y).
struct ElementIndex {
  int i = 0;
  int j = 0;
  friend constexpr bool operator==(ElementIndex, ElementIndex) = default;
};

struct LocatedPoint {
  ElementIndex element;
  Vec2 local;  ///< reference coordinates (xi, eta) in [0,1]^2
};

/// Vertices and tensor-product weights of the bilinear interpolant at a point.
struct Q1Stencil {
  std::array<std::size_t, 4> vertices{};  ///< (i,j), (i+1,j), (i,j+1), (i+1,j+1)
  std::array<double, 4> weights{};
};

struct MeshStatistics {
  double h_min = 0.0;
  double h_max = 0.0;
  std::size_t n_elements = 0;
};

/// Tensor-product rectangular grid on the unit square.
///
/// Vertices are numbered lexicographically with x fastest: v = j * (n + 1) + i.
/// Immutable after construction.
class Mesh {
 public:
  /// Validates that both arrays have the same length >= 2, start at 0, end at
  /// 1 and are strictly increasing.
  Mesh(std::vector<double> x_coords, std::vector<double> y_coords);

  static Mesh uniform(int n);

  /// Geometric grading: element widths shrink by `gamma` per element from the
  /// centre towards each wall, each half normalised to width 0.5.
  static Mesh ratio_graded(int n, double gamma);

  /// x_i = 2 (i/N)^2 on the left half (mirrored on the right),
  /// y_i = 1 - (1 - i/N)^2. Finest rows sit under the lid.
  static Mesh quadratic_graded(int n);

  int n() const { return n_; }
  std::size_t num_vertices() const { return static_cast<std::size_t>(n_ + 1) * (n_ + 1); }
  std::size_t num_elements() const { return static_cast<std::size_t>(n_) * n_; }

  const std::vector<double>& x_coords() const { return x_; }
  const std::vector<double>& y_coords() const { return y_; }

  std::size_t vertex_index(int i, int j) const {
    return static_cast<std::size_t>(j) * (n_ + 1) + static_cast<std::size_t>(i);
  }
  Point vertex(std::size_t v) const {
    const auto stride = static_cast<std::size_t>(n_ + 1);
    return {x_[v % stride], y_[v / stride]};
  }
  Point vertex(int i, int j) const { return {x_[i], y_[j]}; }
  bool is_boundary_vertex(std::size_t v) const;

  double dx(int i) const { return x_[i + 1] - x_[i]; }
  double dy(int j) const { return y_[j + 1] - y_[j]; }

  /// Corner vertices of element (i,j) in stencil order.
  std::array<std::size_t, 4> element_vertices(ElementIndex e) const {
    return {vertex_index(e.i, e.j), vertex_index(e.i + 1, e.j), vertex_index(e.i, e.j + 1),
            vertex_index(e.i + 1, e.j + 1)};
  }

  /// Points on an interior mesh line go to the element with the larger index.
  /// Throws std::domain_error outside the closed unit square.
  LocatedPoint locate(Point p) const;
  Point to_physical(const LocatedPoint& lp) const;
  Q1Stencil stencil(Point p) const;

  MeshStatistics statistics() const;

  /// Two lines of whitespace-separated coordinates: x array, then y array.
  void write_text(std::ostream& out) const;
  static Mesh read_text(std::istream& in);

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  int n_ = 0;
};

/// Mesh family selector used by run configurations.
enum class MeshKind { uniform, ratio, quadratic };

struct MeshSpec {
  MeshKind kind = MeshKind::ratio;
  int n = 90;
  double gamma = 0.96;

  /// "ratio:N[:gamma]", "quadratic:N" or "uniform:N".
  static MeshSpec parse(const std::string& text);
  std::string to_string() const;
  Mesh build() const;

  friend bool operator==(const MeshSpec&, const MeshSpec&) = default;
};

}  // namespace oldroyd
