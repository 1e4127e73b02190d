#pragma once

#include <cmath>
#include <utility>

namespace oldroyd {

/// Point or vector in the plane.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

using Point = Vec2;

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double max_abs(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }

/// General 2x2 matrix. Velocity gradients follow (grad u)_ij = du_i/dx_j.
struct Tensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yx = 0.0;
  double yy = 0.0;

  static constexpr Tensor2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  constexpr double trace() const { return xx + yy; }
  constexpr double det() const { return xx * yy - xy * yx; }
  constexpr Tensor2 transpose() const { return {xx, yx, xy, yy}; }
  double max_abs() const {
    return std::max(std::max(std::abs(xx), std::abs(xy)), std::max(std::abs(yx), std::abs(yy)));
  }

  friend constexpr Tensor2 operator+(const Tensor2& a, const Tensor2& b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yx + b.yx, a.yy + b.yy};
  }
  friend constexpr Tensor2 operator-(const Tensor2& a, const Tensor2& b) {
    return {a.xx - b.xx, a.xy - b.xy, a.yx - b.yx, a.yy - b.yy};
  }
  friend constexpr Tensor2 operator*(double s, const Tensor2& a) {
    return {s * a.xx, s * a.xy, s * a.yx, s * a.yy};
  }
  friend constexpr Tensor2 operator*(const Tensor2& a, const Tensor2& b) {
    return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
            a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
  }
  friend constexpr Vec2 operator*(const Tensor2& a, Vec2 v) {
    return {a.xx * v.x + a.xy * v.y, a.yx * v.x + a.yy * v.y};
  }
  friend constexpr bool operator==(const Tensor2&, const Tensor2&) = default;
};

/// Symmetric 2x2 tensor stored as (s11, s12, s22).
struct SymTensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static constexpr SymTensor2 identity() { return {1.0, 0.0, 1.0}; }

  constexpr double trace() const { return xx + yy; }
  constexpr double det() const { return xx * yy - xy * xy; }
  constexpr Tensor2 full() const { return {xx, xy, xy, yy}; }
  double max_abs() const {
    return std::max(std::max(std::abs(xx), std::abs(xy)), std::abs(yy));
  }

  friend constexpr SymTensor2 operator+(const SymTensor2& a, const SymTensor2& b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
  }
  friend constexpr SymTensor2 operator-(const SymTensor2& a, const SymTensor2& b) {
    return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
  }
  friend constexpr SymTensor2 operator*(double s, const SymTensor2& a) {
    return {s * a.xx, s * a.xy, s * a.yy};
  }
  friend constexpr bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

/// F S F^T for symmetric S; the result is symmetric with no post-symmetrization.
constexpr SymTensor2 congruence(const Tensor2& f, const SymTensor2& s) {
  // B = F S
  const double bxx = f.xx * s.xx + f.xy * s.xy;
  const double bxy = f.xx * s.xy + f.xy * s.yy;
  const double byx = f.yx * s.xx + f.yy * s.xy;
  const double byy = f.yx * s.xy + f.yy * s.yy;
  // B F^T, upper triangle only
  return {bxx * f.xx + bxy * f.xy, bxx * f.yx + bxy * f.yy, byx * f.yx + byy * f.yy};
}

struct Eigenvalues {
  double min = 0.0;
  double max = 0.0;
};

/// Closed-form eigenvalues of a symmetric 2x2 tensor.
inline Eigenvalues sym_eigenvalues(const SymTensor2& s) {
  const double mean = 0.5 * (s.xx + s.yy);
  const double radius = std::hypot(0.5 * (s.xx - s.yy), s.xy);
  return {mean - radius, mean + radius};
}

}  // namespace oldroyd
