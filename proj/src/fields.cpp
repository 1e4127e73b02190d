#include "oldroyd/fields.hpp"

namespace oldroyd {

double eval_scalar(const ScalarField& f, Point p) { return f(p); }
Vec2 eval_vector(const VectorField& f, Point p) { return f(p); }
SymTensor2 eval_conf(const ConfField& f, Point p) { return f(p); }

Tensor2 element_gradient(const VectorField& u, ElementIndex e, Vec2 local) {
  const Mesh& mesh = u.mesh();
  const auto v = mesh.element_vertices(e);
  const double hx = mesh.dx(e.i);
  const double hy = mesh.dy(e.j);
  const double xi = local.x;
  const double eta = local.y;
  const Vec2 u00 = u[v[0]], u10 = u[v[1]], u01 = u[v[2]], u11 = u[v[3]];
  // d/dx of the bilinear interpolant, linear in eta; d/dy linear in xi.
  const Vec2 ddx = (1.0 / hx) * ((1.0 - eta) * (u10 - u00) + eta * (u11 - u01));
  const Vec2 ddy = (1.0 / hy) * ((1.0 - xi) * (u01 - u00) + xi * (u11 - u10));
  return {ddx.x, ddy.x, ddx.y, ddy.y};
}

std::vector<Tensor2> vertex_averaged_gradient(const VectorField& u) {
  const Mesh& mesh = u.mesh();
  const int n = mesh.n();
  std::vector<Tensor2> integral(mesh.num_vertices());
  std::vector<double> area(mesh.num_vertices(), 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const ElementIndex e{i, j};
      const double measure = mesh.dx(i) * mesh.dy(j);
      // grad of a bilinear function is affine in each direction, so its
      // element integral is the gradient at the centroid times the area.
      const Tensor2 g = measure * element_gradient(u, e, {0.5, 0.5});
      for (const auto vtx : mesh.element_vertices(e)) {
        integral[vtx] = integral[vtx] + g;
        area[vtx] += measure;
      }
    }
  }
  for (std::size_t v = 0; v < integral.size(); ++v) integral[v] = (1.0 / area[v]) * integral[v];
  return integral;
}

FieldEigenExtrema eigen_extrema(const ConfField& conf) {
  FieldEigenExtrema out;
  for (std::size_t v = 0; v < conf.size(); ++v) {
    const auto ev = sym_eigenvalues(conf[v]);
    if (v == 0 || ev.min < out.lambda_min) {
      out.lambda_min = ev.min;
      out.argmin = v;
    }
    if (v == 0 || ev.max > out.lambda_max) {
      out.lambda_max = ev.max;
      out.argmax = v;
    }
  }
  return out;
}

}  // namespace oldroyd
