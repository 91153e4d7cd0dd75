#include "vbmo/common.hpp"

#include <algorithm>

namespace vbmo {

namespace {

// Cyclic Jacobi eigenvalues of a symmetric n x n block.
std::array<double, 3> sym_eigenvalues(Mat s, int n) {
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += s[p][q] * s[p][q];
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (s[p][q] == 0.0) continue;
        const double theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double skp = s[k][p], skq = s[k][q];
          s[k][p] = c * skp - sn * skq;
          s[k][q] = sn * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          const double spk = s[p][k], sqk = s[q][k];
          s[p][k] = c * spk - sn * sqk;
          s[q][k] = sn * spk + c * sqk;
        }
      }
    }
  }
  return {s[0][0], n > 1 ? s[1][1] : 0.0, n > 2 ? s[2][2] : 0.0};
}

}  // namespace

double operator_norm(const Mat& a, int n) {
  Mat ata{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) ata[i][j] += a[k][i] * a[k][j];
  const auto ev = sym_eigenvalues(ata, n);
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, ev[i]);
  return std::sqrt(std::max(m, 0.0));
}

Mat inverse(const Mat& a, int n) {
  Mat r = identity();
  if (n == 1) {
    if (a[0][0] == 0.0) throw PreconditionError("singular matrix");
    r[0][0] = 1.0 / a[0][0];
    return r;
  }
  if (n == 2) {
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (det == 0.0) throw PreconditionError("singular matrix");
    r[0][0] = a[1][1] / det;
    r[0][1] = -a[0][1] / det;
    r[1][0] = -a[1][0] / det;
    r[1][1] = a[0][0] / det;
    return r;
  }
  const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
  if (det == 0.0) throw PreconditionError("singular matrix");
  r[0][0] = c00 / det;
  r[1][0] = c01 / det;
  r[2][0] = c02 / det;
  r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return r;
}

Vec random_direction(Rng& rng, int n) {
  for (;;) {
    Vec v{0, 0, 0};
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    const double r = norm(v);
    if (r > 1e-12) return (1.0 / r) * v;
  }
}

Vec random_in_ball(Rng& rng, int n) {
  for (;;) {
    Vec v{0, 0, 0};
    for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
    if (dot(v, v) <= 1.0) return v;
  }
}

}  // namespace vbmo
