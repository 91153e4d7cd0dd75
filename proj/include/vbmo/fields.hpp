// Uniform-grid scalar and vector fields, discrete calculus, ball averages and norms.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vbmo/common.hpp"
#include "vbmo/parallel.hpp"

namespace vbmo {

// Nodes sit at origin + i*spacing, row-major with axis 0 slowest. Unused axes
// of a 2-D grid have shape 1.
struct Grid {
  int ndim = 2;
  std::array<std::size_t, 3> shape{4, 4, 1};
  Vec spacing{1, 1, 1};
  Vec origin{0, 0, 0};
  std::array<bool, 3> periodic{false, false, false};

  std::size_t size() const { return shape[0] * shape[1] * shape[2]; }
  std::size_t stride(int axis) const {
    return axis == 0 ? shape[1] * shape[2] : axis == 1 ? shape[2] : 1;
  }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const {
    return (i * shape[1] + j) * shape[2] + k;
  }
  std::array<std::size_t, 3> unravel(std::size_t idx) const {
    const std::size_t k = idx % shape[2];
    const std::size_t j = (idx / shape[2]) % shape[1];
    return {idx / (shape[1] * shape[2]), j, k};
  }
  double coord(int axis, std::size_t i) const {
    return origin[axis] + static_cast<double>(i) * spacing[axis];
  }
  Vec node(std::size_t idx) const {
    const auto ijk = unravel(idx);
    Vec x{0, 0, 0};
    for (int a = 0; a < ndim; ++a) x[a] = coord(a, ijk[a]);
    return x;
  }
  double length(int axis) const { return static_cast<double>(shape[axis]) * spacing[axis]; }
  double cell_volume() const;
  double max_spacing() const;
  bool fully_periodic() const;
  void validate() const;
  bool operator==(const Grid&) const = default;

  // Periodic grid of n cells per axis on [0, length)^ndim.
  static Grid torus(int ndim, std::size_t n, double length = 1.0);
  // Non-periodic cell-centred grid of n cells per axis covering [lo, hi].
  static Grid box(int ndim, std::size_t n, const Vec& lo, const Vec& hi);
};

struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

struct VectorField {
  Grid grid;
  std::vector<std::vector<double>> c;

  VectorField() = default;
  explicit VectorField(const Grid& g, int ncomp = -1, double fill = 0.0)
      : grid(g), c(static_cast<std::size_t>(ncomp < 0 ? g.ndim : ncomp), std::vector<double>(g.size(), fill)) {}
  int ncomp() const { return static_cast<int>(c.size()); }
  ScalarField component(int a) const;
};

enum class Scheme { central, spectral };

void require_finite(const ScalarField& u);
void require_finite(const VectorField& f);
Mask mask_from(const ScalarField& m);

ScalarField partial(const ScalarField& u, int axis, Scheme scheme);
VectorField gradient(const ScalarField& u, Scheme scheme);
ScalarField divergence(const VectorField& f, Scheme scheme);

// Mean of samples at nodes in the closed ball |x - center| <= radius (minimum
// image distance on periodic axes), restricted to mask when given.
double ball_average(const ScalarField& u, const Vec& center, double radius, const Mask* mask = nullptr);
double ball_average(const ScalarField& u, const Vec& center, double radius, const ScalarField& mask);

// Cell-volume quadrature; p = kInf gives the max norm. Vector fields use the
// pointwise Euclidean length.
double lp_norm(const ScalarField& u, double p, const Mask* mask = nullptr);
double lp_norm(const VectorField& f, double p, const Mask* mask = nullptr);
double inner(const VectorField& a, const VectorField& b, const Mask* mask = nullptr);
double inner(const ScalarField& a, const ScalarField& b, const Mask* mask = nullptr);

// Band-limited random field with spectrum |k|^-decay, unit L2 norm.
ScalarField synth_field(const Grid& grid, double decay, std::uint64_t seed);

ScalarField sample(const Grid& g, const std::function<double(const Vec&)>& fn);
VectorField sample(const Grid& g, const std::function<Vec(const Vec&)>& fn);
// Component a is sampled at the face midpoint x + spacing[a]/2 e_a, matching
// the staggered reading used by the masked Helmholtz solver.
VectorField sample_on_faces(const Grid& g, const std::function<Vec(const Vec&)>& fn);

// Minimum-image displacement from c to node coordinate x along an axis.
inline double axis_displacement(const Grid& g, int axis, double x, double c) {
  double d = x - c;
  if (g.periodic[axis]) {
    const double L = g.length(axis);
    d -= L * std::round(d / L);
  }
  return d;
}

// Candidate node lists of a ball, per axis, ascending; iterating the nested
// product visits nodes in ascending linear index.
struct BallIndex {
  std::array<std::vector<std::size_t>, 3> idx;
  std::array<std::vector<double>, 3> disp;
  double r2 = 0.0;
};
BallIndex ball_index(const Grid& g, const Vec& center, double radius);

template <class Fn>
void for_each_in_ball(const Grid& g, const BallIndex& b, Fn&& fn) {
  const std::size_t s0 = g.stride(0), s1 = g.stride(1);
  for (std::size_t a = 0; a < b.idx[0].size(); ++a) {
    const double d0 = b.disp[0][a] * b.disp[0][a];
    for (std::size_t c = 0; c < b.idx[1].size(); ++c) {
      const double d1 = d0 + b.disp[1][c] * b.disp[1][c];
      const std::size_t base = b.idx[0][a] * s0 + b.idx[1][c] * s1;
      for (std::size_t e = 0; e < b.idx[2].size(); ++e) {
        const double d2 = d1 + b.disp[2][e] * b.disp[2][e];
        if (d2 <= b.r2) fn(base + b.idx[2][e]);
      }
    }
  }
}

// Mean oscillation of the given components over a closed ball: the average of
// |u - u_B| (Euclidean over components). Returns false when no node qualifies.
bool ball_oscillation(const Grid& g, const std::vector<const double*>& comps, const Mask* mask,
                      const Vec& center, double radius, double& oscillation);

// VBMO1 binary field files.
struct FieldFile {
  Grid grid;
  std::vector<std::vector<double>> comps;
};
void write_vbmo(const std::string& path, const Grid& grid, const std::vector<std::vector<double>>& comps);
void write_vbmo(const std::string& path, const ScalarField& u);
void write_vbmo(const std::string& path, const VectorField& f);
FieldFile read_vbmo(const std::string& path);
std::vector<std::uint8_t> encode_vbmo(const Grid& grid, const std::vector<std::vector<double>>& comps);
FieldFile decode_vbmo(const std::vector<std::uint8_t>& bytes);

}  // namespace vbmo
