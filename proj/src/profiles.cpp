#include "vbmo/profiles.hpp"

#include <cmath>

namespace vbmo {

Jet3 operator+(const Jet3& a, const Jet3& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3}; }

Jet3 operator*(const Jet3& a, const Jet3& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3};
}

Jet3 operator/(const Jet3& u, const Jet3& w) {
  Jet3 q;
  q.v = u.v / w.v;
  q.d1 = (u.d1 - q.v * w.d1) / w.v;
  q.d2 = (u.d2 - 2.0 * q.d1 * w.d1 - q.v * w.d2) / w.v;
  q.d3 = (u.d3 - 3.0 * q.d2 * w.d1 - 3.0 * q.d1 * w.d2 - q.v * w.d3) / w.v;
  return q;
}

Jet3 compose(const Jet3& f, const Jet3& g) {
  return {f.v, f.d1 * g.d1, f.d2 * g.d1 * g.d1 + f.d1 * g.d2,
          f.d3 * g.d1 * g.d1 * g.d1 + 3.0 * f.d2 * g.d1 * g.d2 + f.d1 * g.d3};
}

namespace {

Jet3 zeta(double t) {
  if (t < kZetaFloor) return {};
  const double z = std::exp(-1.0 / t);
  const double i = 1.0 / t, i2 = i * i, i3 = i2 * i, i4 = i2 * i2;
  return {z, z * i2, z * (i4 - 2.0 * i3), z * (i4 * i2 - 6.0 * i4 * i + 6.0 * i4)};
}

// zeta(b - s) / (zeta(b - s) + zeta(s - a)) for s >= 0.
Jet3 plateau(double s, double a, double b) {
  if (s <= a) return {1.0, 0.0, 0.0, 0.0};
  if (s >= b) return {};
  Jet3 up = zeta(b - s);
  up.d1 = -up.d1;
  up.d3 = -up.d3;
  const Jet3 down = zeta(s - a);
  if (down.v == 0.0) return {1.0, 0.0, 0.0, 0.0};
  if (up.v == 0.0) return {};
  return up / (up + down);
}

}  // namespace

double plateau_radius(Profile kind) {
  switch (kind) {
    case Profile::phi: return 1.0;
    case Profile::psi: return 3.0;
    case Profile::theta: return 1.0;
    default: return 0.0;
  }
}

double support_radius(Profile kind) {
  switch (kind) {
    case Profile::phi: return 1.5;
    case Profile::psi: return 4.0;
    case Profile::theta: return 2.0;
    default: return INFINITY;
  }
}

Jet3 bump(Profile kind, double t) {
  if (kind == Profile::zeta) return zeta(t);
  Jet3 j = plateau(std::fabs(t), plateau_radius(kind), support_radius(kind));
  if (t < 0.0) {
    j.d1 = -j.d1;
    j.d3 = -j.d3;
  }
  return j;
}

}  // namespace vbmo
