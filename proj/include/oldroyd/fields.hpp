#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "oldroyd/mesh.hpp"
#include "oldroyd/tensor.hpp"

namespace oldroyd {

using MeshPtr = std::shared_ptr<const Mesh>;

/// Nodal Q1 field: one value of type T per mesh vertex, lexicographic order.
template <typename T>
class NodalField {
 public:
  using value_type = T;

  NodalField() = default;
  explicit NodalField(MeshPtr mesh, T fill = T{})
      : mesh_(std::move(mesh)), values_(mesh_->num_vertices(), fill) {}
  NodalField(MeshPtr mesh, std::vector<T> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_->num_vertices()) {
      throw std::invalid_argument("field: value count does not match the mesh vertex count");
    }
  }

  /// Samples `f` at every vertex.
  static NodalField interpolate(MeshPtr mesh, const std::function<T(Point)>& f) {
    NodalField field(mesh);
    for (std::size_t v = 0; v < field.size(); ++v) field.values_[v] = f(mesh->vertex(v));
    return field;
  }

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  std::size_t size() const { return values_.size(); }

  T& operator[](std::size_t v) { return values_[v]; }
  const T& operator[](std::size_t v) const { return values_[v]; }
  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

  /// Bilinear interpolation; std::domain_error outside the unit square.
  /// Nested lerps: constants and vertex values come back bit for bit.
  T operator()(Point p) const {
    const LocatedPoint lp = mesh_->locate(p);
    const auto v = mesh_->element_vertices(lp.element);
    const double xi = lp.local.x, eta = lp.local.y;
    return lerp(lerp(values_[v[0]], values_[v[1]], xi), lerp(values_[v[2]], values_[v[3]], xi), eta);
  }

 private:
  static T lerp(const T& a, const T& b, double t) { return t == 1.0 ? b : a + t * (b - a); }

  MeshPtr mesh_;
  std::vector<T> values_;
};

using ScalarField = NodalField<double>;
using VectorField = NodalField<Vec2>;
/// Conformation tensor field, stored as (s11, s12, s22) per vertex.
using ConfField = NodalField<SymTensor2>;

double eval_scalar(const ScalarField& f, Point p);
Vec2 eval_vector(const VectorField& f, Point p);
SymTensor2 eval_conf(const ConfField& f, Point p);

/// Gradient of the bilinear interpolant on one element (constant-in-x/y parts
/// evaluated at local point `local`).
Tensor2 element_gradient(const VectorField& u, ElementIndex e, Vec2 local);

/// Patch-averaged velocity gradient at every vertex: the integral of grad u
/// over the elements touching the vertex divided by the patch area.
std::vector<Tensor2> vertex_averaged_gradient(const VectorField& u);

/// Smallest eigenvalue over all vertices, with the vertex where it occurs.
struct FieldEigenExtrema {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::size_t argmin = 0;
  std::size_t argmax = 0;
};
FieldEigenExtrema eigen_extrema(const ConfField& conf);

}  // namespace oldroyd
