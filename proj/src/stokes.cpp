#include "oldroyd/stokes.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/UmfPackSupport>

#include "oldroyd/errors.hpp"

namespace oldroyd {

namespace {

constexpr double kResidualTarget = 1e-10;
constexpr int kMaxRefinements = 4;

/// Bilinear basis on a rectangle of size hx x hy, evaluated at a reference
/// point (xi, eta) in [0,1]^2. Corner order matches Mesh::element_vertices.
struct RectBasis {
  std::array<double, 4> value;
  std::array<double, 4> ddx;
  std::array<double, 4> ddy;

  RectBasis(double hx, double hy, double xi, double eta) {
    value = {(1 - xi) * (1 - eta), xi * (1 - eta), (1 - xi) * eta, xi * eta};
    ddx = {-(1 - eta) / hx, (1 - eta) / hx, -eta / hx, eta / hx};
    ddy = {-(1 - xi) / hy, -xi / hy, (1 - xi) / hy, xi / hy};
  }
};

template <int N>
struct GaussRule {
  std::array<double, N> point;   // on [0,1]
  std::array<double, N> weight;  // sums to 1
};

constexpr GaussRule<2> gauss2() {
  // 0.5 -+ 0.5/sqrt(3)
  return {{0.21132486540518711775, 0.78867513459481288225}, {0.5, 0.5}};
}

constexpr GaussRule<3> gauss3() {
  // 0.5 -+ 0.5 sqrt(3/5)
  return {{0.11270166537925831148, 0.5, 0.88729833462074168852},
          {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
}

}  // namespace

struct StokesSystem::Factorization {
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
};

StokesSystem::~StokesSystem() = default;
StokesSystem::StokesSystem(StokesSystem&&) noexcept = default;
StokesSystem& StokesSystem::operator=(StokesSystem&&) noexcept = default;

std::string to_string(LidVariant v) {
  return v == LidVariant::standard ? "standard" : "as-printed";
}

LidVariant parse_lid_variant(const std::string& text) {
  if (text == "standard") return LidVariant::standard;
  if (text == "as-printed" || text == "as_printed") return LidVariant::as_printed;
  throw std::invalid_argument("lid profile must be 'standard' or 'as-printed', got '" + text + "'");
}

double lid_velocity(double x, double t, const LidProfile& profile) {
  const double ramp = profile.amplitude * (1.0 + std::tanh(profile.rate * (t - profile.center)));
  const double shape = profile.variant == LidVariant::standard ? x * x * (1.0 - x) * (1.0 - x)
                                                               : x * x * (1.0 - x * x);
  return ramp * shape;
}

std::vector<Vec2> lid_boundary_values(const Mesh& mesh, double t, const LidProfile& profile) {
  std::vector<Vec2> values(mesh.num_vertices());
  const int n = mesh.n();
  for (int i = 0; i <= n; ++i) {
    values[mesh.vertex_index(i, n)] = {lid_velocity(mesh.x_coords()[i], t, profile), 0.0};
  }
  // Corners x = 0, 1 belong to the no-slip side walls as well; the profile
  // vanishes there so both conditions agree.
  values[mesh.vertex_index(0, n)] = {};
  values[mesh.vertex_index(n, n)] = {};
  return values;
}

StokesSystem::StokesSystem(MeshPtr mesh, double beta)
    : mesh_(std::move(mesh)), beta_(beta), nv_(mesh_->num_vertices()) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("stokes: beta must lie in (0, 1]");
  }
  const Mesh& m = *mesh_;
  const int n = m.n();
  const std::size_t ndof = size();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.num_elements() * (64 + 2 * 32 + 16) + 2 * nv_);
  basis_integrals_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv_));

  const auto g = gauss2();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const ElementIndex e{i, j};
      const double hx = m.dx(i), hy = m.dy(j);
      const double area = hx * hy;
      const auto vtx = m.element_vertices(e);

      std::array<std::array<double, 8>, 8> kuu{};  // local velocity index 2a + c
      std::array<std::array<double, 4>, 8> bup{};  // -(q_b, d_c phi_a)
      std::array<std::array<double, 4>, 4> mass{};
      std::array<double, 4> mloc{};

      for (int qx = 0; qx < 2; ++qx) {
        for (int qy = 0; qy < 2; ++qy) {
          const RectBasis phi(hx, hy, g.point[qx], g.point[qy]);
          const double w = g.weight[qx] * g.weight[qy] * area;
          for (int a = 0; a < 4; ++a) {
            const std::array<double, 2> ga{phi.ddx[a], phi.ddy[a]};
            mloc[a] += w * phi.value[a];
            for (int b = 0; b < 4; ++b) {
              const std::array<double, 2> gb{phi.ddx[b], phi.ddy[b]};
              const double dot = ga[0] * gb[0] + ga[1] * gb[1];
              mass[a][b] += w * phi.value[a] * phi.value[b];
              for (int c = 0; c < 2; ++c) {
                for (int d = 0; d < 2; ++d) {
                  // 2 beta eps(phi_a e_c) : eps(phi_b e_d)
                  const double val = beta * ((c == d ? dot : 0.0) + ga[d] * gb[c]);
                  kuu[2 * a + c][2 * b + d] += w * val;
                }
              }
            }
            for (int b = 0; b < 4; ++b) {
              for (int c = 0; c < 2; ++c) bup[2 * a + c][b] -= w * phi.value[b] * ga[c];
            }
          }
        }
      }

      for (int r = 0; r < 8; ++r) {
        const auto row = velocity_dof(vtx[r / 2], r % 2);
        for (int s = 0; s < 8; ++s) {
          triplets.emplace_back(row, velocity_dof(vtx[s / 2], s % 2), kuu[r][s]);
        }
        for (int b = 0; b < 4; ++b) {
          const auto col = pressure_dof(vtx[b]);
          triplets.emplace_back(row, col, bup[r][b]);
          triplets.emplace_back(col, row, bup[r][b]);
        }
      }
      for (int a = 0; a < 4; ++a) {
        basis_integrals_[static_cast<Eigen::Index>(vtx[a])] += mloc[a];
        for (int b = 0; b < 4; ++b) {
          const double stab = mass[a][b] - mloc[a] * mloc[b] / area;
          triplets.emplace_back(pressure_dof(vtx[a]), pressure_dof(vtx[b]), -stab);
        }
      }
    }
  }
  for (std::size_t v = 0; v < nv_; ++v) {
    const double mv = basis_integrals_[static_cast<Eigen::Index>(v)];
    triplets.emplace_back(pressure_dof(v), multiplier_dof(), mv);
    triplets.emplace_back(multiplier_dof(), pressure_dof(v), mv);
  }

  full_.resize(static_cast<Eigen::Index>(ndof), static_cast<Eigen::Index>(ndof));
  full_.setFromTriplets(triplets.begin(), triplets.end());
  full_.makeCompressed();

  reduced_index_.assign(ndof, -1);
  free_dofs_.clear();
  for (std::size_t dof = 0; dof < ndof; ++dof) {
    const bool dirichlet = dof < 2 * nv_ && m.is_boundary_vertex(dof / 2);
    if (!dirichlet) {
      reduced_index_[dof] = static_cast<long>(free_dofs_.size());
      free_dofs_.push_back(dof);
    }
  }

  std::vector<Eigen::Triplet<double>> reduced_triplets;
  reduced_triplets.reserve(static_cast<std::size_t>(full_.nonZeros()));
  for (Eigen::Index col = 0; col < full_.outerSize(); ++col) {
    const long rc = reduced_index_[static_cast<std::size_t>(col)];
    if (rc < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(full_, col); it; ++it) {
      const long rr = reduced_index_[static_cast<std::size_t>(it.row())];
      if (rr >= 0) reduced_triplets.emplace_back(rr, rc, it.value());
    }
  }
  const auto nf = static_cast<Eigen::Index>(free_dofs_.size());
  reduced_.resize(nf, nf);
  reduced_.setFromTriplets(reduced_triplets.begin(), reduced_triplets.end());
  reduced_.makeCompressed();

  lu_ = std::make_unique<Factorization>();
  // Refinement is done here against the reduced operator, not inside UMFPACK.
  lu_->lu.umfpackControl()[UMFPACK_IRSTEP] = 0;
  lu_->lu.compute(reduced_);
  if (lu_->lu.info() != Eigen::Success) {
    throw SolverError("stokes: LU factorisation of the saddle-point operator failed", {});
  }
}

Eigen::VectorXd StokesSystem::dirichlet_lift(const std::vector<Vec2>& boundary_velocity) const {
  if (boundary_velocity.size() != nv_) {
    throw std::invalid_argument("stokes: boundary data must have one entry per vertex");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t v = 0; v < nv_; ++v) {
    if (!mesh_->is_boundary_vertex(v)) continue;
    x[static_cast<Eigen::Index>(velocity_dof(v, 0))] = boundary_velocity[v].x;
    x[static_cast<Eigen::Index>(velocity_dof(v, 1))] = boundary_velocity[v].y;
  }
  return x;
}

Eigen::VectorXd StokesSystem::reduced_rhs(const StokesRhs& rhs) const {
  if (static_cast<std::size_t>(rhs.load.size()) != size()) {
    throw std::invalid_argument("stokes: load vector has the wrong length");
  }
  const Eigen::VectorXd lift = dirichlet_lift(rhs.boundary_velocity);
  const Eigen::VectorXd full_rhs = rhs.load - full_ * lift;
  Eigen::VectorXd b(static_cast<Eigen::Index>(free_dofs_.size()));
  for (std::size_t k = 0; k < free_dofs_.size(); ++k) {
    b[static_cast<Eigen::Index>(k)] = full_rhs[static_cast<Eigen::Index>(free_dofs_[k])];
  }
  return b;
}

Eigen::VectorXd StokesSystem::expand(const Eigen::VectorXd& reduced,
                                     const std::vector<Vec2>& boundary_velocity) const {
  Eigen::VectorXd x = dirichlet_lift(boundary_velocity);
  for (std::size_t k = 0; k < free_dofs_.size(); ++k) {
    x[static_cast<Eigen::Index>(free_dofs_[k])] = reduced[static_cast<Eigen::Index>(k)];
  }
  return x;
}

StokesSolution StokesSystem::solve(const StokesRhs& rhs) const {
  const Eigen::VectorXd b = reduced_rhs(rhs);
  const double bnorm = b.norm();
  SolveStats stats;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  if (bnorm > 0.0) {
    x = lu_->lu.solve(b);
    Eigen::VectorXd r = b - reduced_ * x;
    stats.residual_history.push_back(r.norm() / bnorm);
    for (int k = 0; k < kMaxRefinements && stats.residual_history.back() > kResidualTarget; ++k) {
      x += lu_->lu.solve(r);
      r = b - reduced_ * x;
      stats.residual_history.push_back(r.norm() / bnorm);
    }
    stats.relative_residual = stats.residual_history.back();
    if (!std::isfinite(stats.relative_residual) || stats.relative_residual > kResidualTarget) {
      std::ostringstream msg;
      msg << "stokes: relative residual " << stats.relative_residual << " above target "
          << kResidualTarget << " after " << stats.residual_history.size() << " solves";
      throw SolverError(msg.str(), stats.residual_history);
    }
  } else {
    stats.residual_history.push_back(0.0);
  }

  const Eigen::VectorXd full = expand(x, rhs.boundary_velocity);
  StokesSolution sol{VectorField(mesh_), ScalarField(mesh_), std::move(stats)};
  double mean = 0.0;
  for (std::size_t v = 0; v < nv_; ++v) {
    sol.u[v] = {full[static_cast<Eigen::Index>(velocity_dof(v, 0))],
                full[static_cast<Eigen::Index>(velocity_dof(v, 1))]};
    sol.p[v] = full[static_cast<Eigen::Index>(pressure_dof(v))];
    mean += basis_integrals_[static_cast<Eigen::Index>(v)] * sol.p[v];
  }
  for (std::size_t v = 0; v < nv_; ++v) sol.p[v] -= mean;
  return sol;
}

Eigen::VectorXd assemble_conformation_load(const StokesSystem& sys, const ConfField& conf,
                                           double coeff) {
  const Mesh& m = sys.mesh();
  if (conf.size() != m.num_vertices()) {
    throw std::invalid_argument("stokes: conformation field does not match the mesh");
  }
  Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.size()));
  if (coeff == 0.0) return load;
  const int n = m.n();
  const auto g = gauss2();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double hx = m.dx(i), hy = m.dy(j);
      const auto vtx = m.element_vertices({i, j});
      std::array<double, 8> local{};
      for (int qx = 0; qx < 2; ++qx) {
        for (int qy = 0; qy < 2; ++qy) {
          const RectBasis phi(hx, hy, g.point[qx], g.point[qy]);
          const double w = g.weight[qx] * g.weight[qy] * hx * hy;
          SymTensor2 s{};
          for (int a = 0; a < 4; ++a) s = s + phi.value[a] * conf[vtx[a]];
          for (int b = 0; b < 4; ++b) {
            // conf : eps(phi_b e_d) = sum_j conf_dj d_j phi_b
            local[2 * b + 0] += w * (s.xx * phi.ddx[b] + s.xy * phi.ddy[b]);
            local[2 * b + 1] += w * (s.xy * phi.ddx[b] + s.yy * phi.ddy[b]);
          }
        }
      }
      for (int r = 0; r < 8; ++r) {
        load[static_cast<Eigen::Index>(sys.velocity_dof(vtx[r / 2], r % 2))] += coeff * local[r];
      }
    }
  }
  return load;
}

Eigen::VectorXd assemble_body_force(const StokesSystem& sys, const std::function<Vec2(Point)>& f) {
  const Mesh& m = sys.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.size()));
  const int n = m.n();
  const auto g = gauss3();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double hx = m.dx(i), hy = m.dy(j);
      const auto vtx = m.element_vertices({i, j});
      for (int qx = 0; qx < 3; ++qx) {
        for (int qy = 0; qy < 3; ++qy) {
          const RectBasis phi(hx, hy, g.point[qx], g.point[qy]);
          const double w = g.weight[qx] * g.weight[qy] * hx * hy;
          const Vec2 fq = f({m.x_coords()[i] + g.point[qx] * hx, m.y_coords()[j] + g.point[qy] * hy});
          for (int b = 0; b < 4; ++b) {
            load[static_cast<Eigen::Index>(sys.velocity_dof(vtx[b], 0))] += w * fq.x * phi.value[b];
            load[static_cast<Eigen::Index>(sys.velocity_dof(vtx[b], 1))] += w * fq.y * phi.value[b];
          }
        }
      }
    }
  }
  return load;
}

StokesRhs assemble_rhs(const StokesSystem& sys, const ConfField& conf, double wi, double t,
                       const LidProfile& profile) {
  if (!(wi > 0.0)) throw std::invalid_argument("stokes: Weissenberg number must be positive");
  const double coeff = (sys.beta() - 1.0) / wi;
  return {assemble_conformation_load(sys, conf, coeff), lid_boundary_values(sys.mesh(), t, profile)};
}

}  // namespace oldroyd
