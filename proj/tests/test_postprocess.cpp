#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oldroyd/errors.hpp"
#include "oldroyd/postprocess.hpp"

using namespace oldroyd;

namespace {

MeshPtr share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

ConfField random_spd(const MeshPtr& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ConfField f(mesh);
  for (std::size_t v = 0; v < f.size(); ++v) {
    const double a = 0.01 + 50.0 * unit(rng), b = 0.01 + 5.0 * unit(rng);
    const double c = 0.99 * std::sqrt(a * b) * (2.0 * unit(rng) - 1.0);
    f[v] = {a, c, b};
  }
  return f;
}

}  // namespace

TEST(CrossSection, ConstantFieldGivesConstantSeries) {
  const auto mesh = share(Mesh::ratio_graded(10, 0.96));
  const ScalarField f(mesh, 4.25);
  for (Axis axis : {Axis::horizontal, Axis::vertical}) {
    const CrossSection cs = sample_cross_section(f, axis, 0.3, 57);
    ASSERT_EQ(cs.s.size(), 57u);
    for (double v : cs.columns[0]) EXPECT_EQ(v, 4.25);
  }
}

TEST(CrossSection, AffineFieldAlongNearTopLine) {
  const auto mesh = share(Mesh::quadratic_graded(16));
  const auto f = ScalarField::interpolate(mesh, [](Point p) { return p.x + 2.0 * p.y; });
  const CrossSection cs = sample_cross_section(f, Axis::horizontal, 0.75, 101);
  EXPECT_DOUBLE_EQ(cs.s.front(), 0.0);
  EXPECT_DOUBLE_EQ(cs.s.back(), 1.0);
  for (std::size_t k = 0; k < cs.s.size(); ++k) EXPECT_NEAR(cs.columns[0][k], cs.s[k] + 1.5, 1e-12);
}

TEST(CrossSection, ConformationColumnsAndCsv) {
  const auto mesh = share(Mesh::uniform(2));
  const CrossSection cs = sample_cross_section(ConfField(mesh, SymTensor2::identity()), Axis::vertical, 0.5, 11);
  EXPECT_EQ(cs.names, (std::vector<std::string>{"s11", "s12", "s22"}));
  std::ostringstream out;
  cs.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "s,s11,s12,s22");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 11);
}

TEST(CrossSection, RejectsBadArguments) {
  const ScalarField f(share(Mesh::uniform(2)), 1.0);
  EXPECT_THROW(sample_cross_section(f, Axis::horizontal, 1.5, 10), std::invalid_argument);
  EXPECT_THROW(sample_cross_section(f, Axis::horizontal, -0.1, 10), std::invalid_argument);
  EXPECT_THROW(sample_cross_section(f, Axis::horizontal, 0.5, 1), std::invalid_argument);
}

TEST(CrossSection, RefinedSamplingSharesPointsExactly) {
  std::mt19937_64 rng(4);
  const auto mesh = share(Mesh::ratio_graded(30, 0.96));
  const ConfField f = random_spd(mesh, rng);
  for (int n : {11, 101, 1001}) {
    const CrossSection coarse = sample_cross_section(f, Axis::vertical, 0.5, n);
    const CrossSection fine = sample_cross_section(f, Axis::vertical, 0.5, 2 * n - 1);
    for (int k = 0; k < n; ++k) {
      ASSERT_EQ(coarse.s[k], fine.s[2 * k]);
      for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(coarse.columns[c][k], fine.columns[c][2 * k]);
    }
    // Doubling the count only shares the end points; they agree too.
    const CrossSection doubled = sample_cross_section(f, Axis::vertical, 0.5, 2 * n);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_EQ(coarse.columns[c].front(), doubled.columns[c].front());
      EXPECT_EQ(coarse.columns[c].back(), doubled.columns[c].back());
    }
  }
}

TEST(MidlineMax, IdentityGivesZero) {
  EXPECT_EQ(midline_max_log_sigma11(ConfField(share(Mesh::ratio_graded(10, 0.96)), SymTensor2::identity())), 0.0);
}

TEST(MidlineMax, MatchesPiecewiseLinearOracle) {
  // Along x = const the bilinear interpolant is piecewise linear in y with
  // breaks at the mesh rows, so the maximum sits on a row.
  std::mt19937_64 rng(21);
  for (const auto& mesh : {share(Mesh::uniform(3)), share(Mesh::quadratic_graded(12)), share(Mesh::ratio_graded(40, 0.96))}) {
    const ConfField f = random_spd(mesh, rng);
    double best = 0.0;
    for (double y : mesh->y_coords()) best = std::max(best, eval_conf(f, {0.5, y}).xx);
    EXPECT_NEAR(midline_max_log_sigma11(f), std::log(best), 1e-12);
  }
}

TEST(MidlineMax, GoldenSectionFindsOffGridPeak) {
  // A peak strictly inside the coarse sampling interval.
  const auto mesh = share(Mesh({0.0, 0.5, 1.0}, {0.0, 0.6180339887, 1.0}));
  ConfField f(mesh, SymTensor2::identity());
  f[mesh->vertex_index(1, 1)] = {20.0, 0.0, 1.0};
  EXPECT_NEAR(midline_max_log_sigma11(f, 4), std::log(20.0), 1e-9);
}

TEST(MidlineMax, RejectsNonPositiveS11) {
  ConfField f(share(Mesh::uniform(2)), SymTensor2::identity());
  f[4] = {-1.0, 0.0, 1.0};
  EXPECT_THROW(midline_max_log_sigma11(f), NumericalError);
}

TEST(GlobalMax, Examples) {
  EXPECT_EQ(global_max_sigma11(ConfField(share(Mesh::uniform(4)), SymTensor2{3.0, 0.0, 1.0})), 3.0);
  ConfField f(share(Mesh::uniform(4)), SymTensor2::identity());
  f[7] = {9.5, 1.0, 2.0};
  EXPECT_EQ(global_max_sigma11(f), 9.5);
}

TEST(GlobalMax, BoundsMidlineMax) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 50; ++k) {
    const auto mesh = share(k % 2 ? Mesh::ratio_graded(2 + 2 * (k % 9), 0.9) : Mesh::quadratic_graded(2 + 2 * (k % 7)));
    const ConfField f = random_spd(mesh, rng);
    const double g = global_max_sigma11(f);
    EXPECT_LE(std::exp(midline_max_log_sigma11(f)), g + 1e-9 * g);
  }
}

TEST(VortexCenter, RigidRotation) {
  for (const auto& mesh : {share(Mesh::uniform(10)), share(Mesh::ratio_graded(30, 0.96)), share(Mesh::quadratic_graded(20))}) {
    const auto u = VectorField::interpolate(mesh, [](Point p) { return Vec2{-(p.y - 0.5), p.x - 0.5}; });
    const VortexCenter vc = vortex_center(u);
    EXPECT_TRUE(vc.converged);
    EXPECT_NEAR(vc.center.x, 0.5, 1e-10);
    EXPECT_NEAR(vc.center.y, 0.5, 1e-10);
    EXPECT_LT(norm(eval_vector(u, vc.center)), 1e-8);
  }
}

TEST(VortexCenter, OffCentreRotation) {
  const auto mesh = share(Mesh::ratio_graded(40, 0.96));
  const Point c{0.43, 0.81};
  const auto u = VectorField::interpolate(mesh, [c](Point p) {
    const double r2 = (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
    const double g = std::exp(-4.0 * r2);
    return Vec2{-(p.y - c.y) * g, (p.x - c.x) * g};
  });
  const VortexCenter vc = vortex_center(u);
  EXPECT_TRUE(vc.converged);
  EXPECT_LT(vc.speed, 1e-8);
  EXPECT_NEAR(vc.center.x, c.x, 2e-3);
  EXPECT_NEAR(vc.center.y, c.y, 2e-3);
}

TEST(EigenvalueFields, Examples) {
  const auto mesh = share(Mesh::uniform(3));
  auto [lo, hi] = eigenvalue_fields(ConfField(mesh, SymTensor2::identity()));
  for (std::size_t v = 0; v < lo.size(); ++v) {
    EXPECT_EQ(lo[v], 1.0);
    EXPECT_EQ(hi[v], 1.0);
  }
  auto [lo2, hi2] = eigenvalue_fields(ConfField(mesh, SymTensor2{2.0, 1.0, 2.0}));
  for (std::size_t v = 0; v < lo2.size(); ++v) {
    EXPECT_DOUBLE_EQ(lo2[v], 1.0);
    EXPECT_DOUBLE_EQ(hi2[v], 3.0);
  }
}

TEST(Metrics, Consistent) {
  std::mt19937_64 rng(9);
  const auto mesh = share(Mesh::ratio_graded(20, 0.96));
  const ConfField f = random_spd(mesh, rng);
  const auto u = VectorField::interpolate(mesh, [](Point p) { return Vec2{-(p.y - 0.6), p.x - 0.45}; });
  const Metrics m = compute_metrics(u, f);
  EXPECT_EQ(m.max_s11_global, global_max_sigma11(f));
  EXPECT_EQ(m.max_ln_s11_midline, midline_max_log_sigma11(f));
  EXPECT_EQ(m.lambda_min_global, eigen_extrema(f).lambda_min);
  EXPECT_EQ(m.lambda_max_global, eigen_extrema(f).lambda_max);
  EXPECT_TRUE(m.vortex_converged);
  EXPECT_NEAR(m.vortex_center.x, 0.45, 1e-10);
  EXPECT_NEAR(m.vortex_center.y, 0.6, 1e-10);
}
