// Smooth one-dimensional bump profiles and their derivatives up to order 3.
#pragma once

namespace vbmo {

// Value and first three derivatives of a univariate function at a point.
struct Jet3 {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

Jet3 operator+(const Jet3& a, const Jet3& b);
Jet3 operator*(const Jet3& a, const Jet3& b);
Jet3 operator/(const Jet3& a, const Jet3& b);
// f(g(t)) given the jet of f at g(t) and the jet of g at t.
Jet3 compose(const Jet3& f_at_g, const Jet3& g);

// zeta(t) = exp(-1/t) for t > 0, else 0.
//   phi:   1 on |t| <= 1,   0 on |t| >= 3/2
//   psi:   1 on |t| <= 3,   0 on |t| >= 4
//   theta: 1 on |t| <= 1,   0 on |t| >= 2   (radial profile of the taper)
// The plateau profiles are zeta(b - |t|) / (zeta(b - |t|) + zeta(|t| - a)).
enum class Profile { zeta, phi, psi, theta };

Jet3 bump(Profile kind, double t);
inline double bump_value(Profile kind, double t) { return bump(kind, t).v; }

// zeta values below exp(-30) are flushed to zero.
inline constexpr double kZetaFloor = 1.0 / 30.0;

// Plateau end and support end of a profile (a, b above); zeta has neither.
double plateau_radius(Profile kind);
double support_radius(Profile kind);

}  // namespace vbmo
