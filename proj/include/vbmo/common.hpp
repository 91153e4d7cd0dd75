// Small vector types, error hierarchy and numeric helpers shared by all modules.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace vbmo {

using Vec = std::array<double, 3>;
using Mat = std::array<Vec, 3>;
using Mask = std::vector<std::uint8_t>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error { using Error::Error; };
struct DegenerateBallError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct AmbiguityError : Error { using Error::Error; };
struct OutsideChartError : Error { using Error::Error; };
struct UndefinedRatioError : Error { using Error::Error; };
struct SizeCapError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Mat identity() { return {Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}}; }
inline Vec matvec(const Mat& m, const Vec& v) { return {dot(m[0], v), dot(m[1], v), dot(m[2], v)}; }
inline Vec matTvec(const Mat& m, const Vec& v) {
  Vec r{0, 0, 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[j] += m[i][j] * v[i];
  return r;
}
inline Mat matmul(const Mat& a, const Mat& b) {
  Mat r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}
inline Mat transpose(const Mat& a) {
  Mat r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
  return r;
}

// Spectral norm of the leading n x n block.
double operator_norm(const Mat& a, int n);
// Inverse of the leading n x n block; throws PreconditionError when singular.
Mat inverse(const Mat& a, int n);

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// SplitMix64 / xoshiro-free generator: portable uniform doubles from a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ^ 0x9E3779B97F4A7C15ull) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t s_;
};

// Uniform direction on the unit sphere of R^n.
Vec random_direction(Rng& rng, int n);
// Uniform point in the unit ball of R^n.
Vec random_in_ball(Rng& rng, int n);

}  // namespace vbmo
