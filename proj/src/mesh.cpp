#include "oldroyd/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace oldroyd {

namespace {

void validate_axis(const std::vector<double>& c, const char* name) {
  if (c.size() < 2) {
    throw std::invalid_argument(std::string("mesh: ") + name + " needs at least 2 coordinates");
  }
  if (c.front() != 0.0 || c.back() != 1.0) {
    throw std::invalid_argument(std::string("mesh: ") + name + " must span exactly [0, 1]");
  }
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (!(c[k] > c[k - 1])) {
      throw std::invalid_argument(std::string("mesh: ") + name + " must be strictly increasing");
    }
  }
}

void require_even(int n) {
  if (n <= 0 || n % 2 != 0) {
    throw std::invalid_argument("mesh: element count must be a positive even integer, got " +
                                std::to_string(n));
  }
}

// Index of the cell containing c; interior ties go to the larger index.
int find_cell(const std::vector<double>& coords, double c) {
  const int n = static_cast<int>(coords.size()) - 1;
  const auto it = std::upper_bound(coords.begin(), coords.end(), c);
  const int cell = static_cast<int>(std::distance(coords.begin(), it)) - 1;
  return std::clamp(cell, 0, n - 1);
}

// Coordinates from widths accumulated from both walls towards the centre, so
// the mirror symmetry x_i + x_{N-i} = 1 holds to rounding.
std::vector<double> symmetric_axis(const std::vector<double>& half_widths_from_wall) {
  const int half = static_cast<int>(half_widths_from_wall.size());
  const int n = 2 * half;
  std::vector<double> c(n + 1);
  c[0] = 0.0;
  double acc = 0.0;
  for (int k = 0; k < half; ++k) {
    acc += half_widths_from_wall[k];
    c[k + 1] = acc;
  }
  c[half] = 0.5;
  for (int k = 0; k < half; ++k) {
    c[n - k] = 1.0 - c[k];
  }
  return c;
}

}  // namespace

Mesh::Mesh(std::vector<double> x_coords, std::vector<double> y_coords)
    : x_(std::move(x_coords)), y_(std::move(y_coords)) {
  validate_axis(x_, "x_coords");
  validate_axis(y_, "y_coords");
  if (x_.size() != y_.size()) {
    throw std::invalid_argument("mesh: x and y coordinate arrays must have equal length");
  }
  n_ = static_cast<int>(x_.size()) - 1;
}

Mesh Mesh::uniform(int n) {
  if (n <= 0) throw std::invalid_argument("mesh: element count must be positive");
  std::vector<double> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = static_cast<double>(i) / n;
  c[n] = 1.0;
  return Mesh(c, c);
}

Mesh Mesh::ratio_graded(int n, double gamma) {
  require_even(n);
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("mesh: contraction ratio must lie in (0, 1)");
  }
  const int half = n / 2;
  // Centre element width h0, then h0*gamma^k towards the wall; sum = 0.5.
  const double h0 = 0.5 * (1.0 - gamma) / (1.0 - std::pow(gamma, half));
  std::vector<double> from_wall(half);
  for (int k = 0; k < half; ++k) {
    from_wall[k] = h0 * std::pow(gamma, half - 1 - k);
  }
  auto c = symmetric_axis(from_wall);
  return Mesh(c, c);
}

Mesh Mesh::quadratic_graded(int n) {
  require_even(n);
  const double nn = static_cast<double>(n);
  std::vector<double> x(n + 1), y(n + 1);
  for (int i = 0; i <= n / 2; ++i) {
    const double r = i / nn;
    x[i] = 2.0 * r * r;
  }
  for (int i = n / 2 + 1; i <= n; ++i) x[i] = 1.0 - x[n - i];
  for (int i = 0; i <= n; ++i) {
    const double r = 1.0 - i / nn;
    y[i] = 1.0 - r * r;
  }
  x[n / 2] = 0.5;
  return Mesh(std::move(x), std::move(y));
}

bool Mesh::is_boundary_vertex(std::size_t v) const {
  const auto stride = static_cast<std::size_t>(n_ + 1);
  const auto i = v % stride;
  const auto j = v / stride;
  return i == 0 || j == 0 || i == static_cast<std::size_t>(n_) || j == static_cast<std::size_t>(n_);
}

LocatedPoint Mesh::locate(Point p) const {
  if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
    std::ostringstream msg;
    msg << "mesh: point (" << p.x << ", " << p.y << ") lies outside the unit square";
    throw std::domain_error(msg.str());
  }
  const int i = find_cell(x_, p.x);
  const int j = find_cell(y_, p.y);
  const double xi = std::clamp((p.x - x_[i]) / dx(i), 0.0, 1.0);
  const double eta = std::clamp((p.y - y_[j]) / dy(j), 0.0, 1.0);
  return {{i, j}, {xi, eta}};
}

Point Mesh::to_physical(const LocatedPoint& lp) const {
  const auto [i, j] = lp.element;
  return {x_[i] + lp.local.x * dx(i), y_[j] + lp.local.y * dy(j)};
}

Q1Stencil Mesh::stencil(Point p) const {
  const LocatedPoint lp = locate(p);
  const double xi = lp.local.x;
  const double eta = lp.local.y;
  Q1Stencil s;
  s.vertices = element_vertices(lp.element);
  s.weights = {(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), (1.0 - xi) * eta, xi * eta};
  return s;
}

MeshStatistics Mesh::statistics() const {
  MeshStatistics s;
  s.h_min = std::numeric_limits<double>::infinity();
  s.h_max = 0.0;
  for (int k = 0; k < n_; ++k) {
    for (double h : {dx(k), dy(k)}) {
      s.h_min = std::min(s.h_min, h);
      s.h_max = std::max(s.h_max, h);
    }
  }
  s.n_elements = num_elements();
  return s;
}

void Mesh::write_text(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (const auto* axis : {&x_, &y_}) {
    for (std::size_t k = 0; k < axis->size(); ++k) {
      out << (k ? " " : "") << (*axis)[k];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

Mesh Mesh::read_text(std::istream& in) {
  auto read_line = [&in]() {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("mesh: unexpected end of mesh file");
    std::istringstream ls(line);
    std::vector<double> values{std::istream_iterator<double>(ls), std::istream_iterator<double>()};
    return values;
  };
  auto x = read_line();
  auto y = read_line();
  return Mesh(std::move(x), std::move(y));
}

MeshSpec MeshSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, ':')) parts.push_back(cur);
  if (parts.size() < 2 || parts.size() > 3) {
    throw std::invalid_argument("mesh spec '" + text +
                                "' must be ratio:N[:gamma], quadratic:N or uniform:N");
  }
  MeshSpec spec;
  if (parts[0] == "ratio") {
    spec.kind = MeshKind::ratio;
  } else if (parts[0] == "quadratic") {
    spec.kind = MeshKind::quadratic;
  } else if (parts[0] == "uniform") {
    spec.kind = MeshKind::uniform;
  } else {
    throw std::invalid_argument("mesh spec '" + text + "': unknown mesh type '" + parts[0] + "'");
  }
  const auto& ns = parts[1];
  int n = 0;
  const auto [ptr, ec] = std::from_chars(ns.data(), ns.data() + ns.size(), n);
  if (ec != std::errc() || ptr != ns.data() + ns.size() || n <= 0) {
    throw std::invalid_argument("mesh spec '" + text + "': N must be a positive integer");
  }
  spec.n = n;
  if (parts.size() == 3) {
    if (spec.kind != MeshKind::ratio) {
      throw std::invalid_argument("mesh spec '" + text + "': only ratio meshes take a gamma");
    }
    try {
      std::size_t used = 0;
      spec.gamma = std::stod(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument("mesh spec '" + text + "': gamma must be a number");
    }
  }
  if (spec.kind != MeshKind::uniform && spec.n % 2 != 0) {
    throw std::invalid_argument("mesh spec '" + text + "': N must be even");
  }
  if (spec.kind == MeshKind::ratio && !(spec.gamma > 0.0 && spec.gamma < 1.0)) {
    throw std::invalid_argument("mesh spec '" + text + "': gamma must lie in (0, 1)");
  }
  return spec;
}

std::string MeshSpec::to_string() const {
  switch (kind) {
    case MeshKind::uniform:
      return "uniform:" + std::to_string(n);
    case MeshKind::quadratic:
      return "quadratic:" + std::to_string(n);
    case MeshKind::ratio: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, gamma);
      return "ratio:" + std::to_string(n) + ':' + std::string(buf, res.ptr);
    }
  }
  return {};
}

Mesh MeshSpec::build() const {
  switch (kind) {
    case MeshKind::uniform:
      return Mesh::uniform(n);
    case MeshKind::quadratic:
      return Mesh::quadratic_graded(n);
    case MeshKind::ratio:
      return Mesh::ratio_graded(n, gamma);
  }
  throw std::logic_error("unreachable mesh kind");
}

}  // namespace oldroyd
