#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "oldroyd/fields.hpp"

namespace oldroyd {

/// Lid shape g(x) in u_lid = A (1 + tanh(r (t - c))) g(x).
///   standard:   g = x^2 (1 - x)^2, peak speed 1 once the ramp saturates
///   as_printed: g = x^2 (1 - x^2)
enum class LidVariant { standard, as_printed };

std::string to_string(LidVariant v);
LidVariant parse_lid_variant(const std::string& text);

struct LidProfile {
  LidVariant variant = LidVariant::standard;
  double amplitude = 8.0;
  double rate = 8.0;
  double center = 0.5;

  friend bool operator==(const LidProfile&, const LidProfile&) = default;
};

double lid_velocity(double x, double t, const LidProfile& profile);

/// Per-vertex Dirichlet data: (u_lid(x, t), 0) on y = 1, zero on the other walls.
/// Interior entries are zero and ignored.
std::vector<Vec2> lid_boundary_values(const Mesh& mesh, double t, const LidProfile& profile);

/// Load vector and Dirichlet data for one Stokes solve. `load` has one entry
/// per DOF of the full system; only the velocity rows are normally non-zero.
struct StokesRhs {
  Eigen::VectorXd load;
  std::vector<Vec2> boundary_velocity;
};

struct SolveStats {
  double relative_residual = 0.0;
  std::vector<double> residual_history;
};

struct StokesSolution {
  VectorField u;
  ScalarField p;
  SolveStats stats;
};

/// Equal-order Q1-Q1 Stokes operator with local pressure-projection
/// stabilisation,
///
///   2 beta (eps u, eps v) - (p, div v) - (q, div u) - (p - P0 p, q - P0 q),
///
/// where P0 is the elementwise L2 projection onto constants, plus one scalar
/// Lagrange multiplier enforcing zero pressure mean. All element integrals use
/// 2x2 Gauss quadrature, which is exact for these forms on rectangles.
///
/// DOF layout: velocity 2v + c, pressure 2V + v, multiplier 3V. Dirichlet
/// velocity DOFs are eliminated and the reduced operator is factorised once at
/// construction (sparse LU with partial pivoting); each solve only performs
/// triangular solves.
class StokesSystem {
 public:
  StokesSystem(MeshPtr mesh, double beta);
  ~StokesSystem();
  StokesSystem(StokesSystem&&) noexcept;
  StokesSystem& operator=(StokesSystem&&) noexcept;

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  double beta() const { return beta_; }

  std::size_t size() const { return 3 * nv_ + 1; }
  std::size_t velocity_dof(std::size_t v, int c) const { return 2 * v + static_cast<std::size_t>(c); }
  std::size_t pressure_dof(std::size_t v) const { return 2 * nv_ + v; }
  std::size_t multiplier_dof() const { return 3 * nv_; }
  bool is_dirichlet(std::size_t dof) const { return reduced_index_[dof] < 0; }
  std::size_t num_free() const { return static_cast<std::size_t>(reduced_.rows()); }

  /// Full operator before Dirichlet elimination.
  const Eigen::SparseMatrix<double>& matrix() const { return full_; }
  /// Reduced operator over free velocity, pressure and multiplier DOFs.
  const Eigen::SparseMatrix<double>& reduced_matrix() const { return reduced_; }
  /// Integrals of the Q1 basis functions (the pressure-mean constraint row).
  const Eigen::VectorXd& basis_integrals() const { return basis_integrals_; }

  /// Full-length vector holding the Dirichlet values at Dirichlet velocity DOFs.
  Eigen::VectorXd dirichlet_lift(const std::vector<Vec2>& boundary_velocity) const;
  /// Reduced right-hand side b_f - A_fd x_d.
  Eigen::VectorXd reduced_rhs(const StokesRhs& rhs) const;
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced, const std::vector<Vec2>& boundary_velocity) const;

  /// Solves to relative residual <= 1e-10 (iterative refinement on top of the
  /// LU solve if needed); throws SolverError otherwise. The returned pressure
  /// is re-centred to exactly zero mean.
  StokesSolution solve(const StokesRhs& rhs) const;

 private:
  MeshPtr mesh_;
  double beta_;
  std::size_t nv_;
  Eigen::SparseMatrix<double> full_;
  Eigen::SparseMatrix<double> reduced_;
  Eigen::VectorXd basis_integrals_;
  std::vector<long> reduced_index_;
  std::vector<std::size_t> free_dofs_;
  struct Factorization;
  std::unique_ptr<Factorization> lu_;
};

/// Convenience wrapper matching the assembly operation's name.
inline StokesSystem assemble_stokes_matrix(MeshPtr mesh, double beta) {
  return StokesSystem(std::move(mesh), beta);
}

/// coeff * integral of conf : eps(v) for every velocity test function.
Eigen::VectorXd assemble_conformation_load(const StokesSystem& sys, const ConfField& conf,
                                           double coeff);

/// integral of f . v with 3x3 Gauss quadrature (for manufactured solutions).
Eigen::VectorXd assemble_body_force(const StokesSystem& sys, const std::function<Vec2(Point)>& f);

/// Right-hand side of the lagged Stokes solve: ((beta - 1)/Wi) (conf, eps v)
/// with the lid evaluated at time t.
StokesRhs assemble_rhs(const StokesSystem& sys, const ConfField& conf, double wi, double t,
                       const LidProfile& profile);

}  // namespace oldroyd
