#include "vbmo/fields.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fft.hpp"

namespace vbmo {

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < ndim; ++a) v *= spacing[a];
  return v;
}

double Grid::max_spacing() const {
  double m = 0.0;
  for (int a = 0; a < ndim; ++a) m = std::max(m, spacing[a]);
  return m;
}

bool Grid::fully_periodic() const {
  for (int a = 0; a < ndim; ++a)
    if (!periodic[a]) return false;
  return true;
}

void Grid::validate() const {
  if (ndim != 2 && ndim != 3) throw ConfigError("grid dimension must be 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a < ndim) {
      if (shape[a] < 4) throw ConfigError("grid needs at least 4 samples per axis");
      if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) throw ConfigError("grid spacing must be positive");
      if (!std::isfinite(origin[a])) throw ConfigError("grid origin must be finite");
    } else if (shape[a] != 1) {
      throw ConfigError("unused grid axes must have shape 1");
    }
  }
}

Grid Grid::torus(int ndim, std::size_t n, double length) {
  Grid g;
  g.ndim = ndim;
  g.shape = {n, n, ndim == 3 ? n : 1};
  for (int a = 0; a < 3; ++a) {
    g.spacing[a] = a < ndim ? length / static_cast<double>(n) : 1.0;
    g.origin[a] = 0.0;
    g.periodic[a] = a < ndim;
  }
  g.validate();
  return g;
}

Grid Grid::box(int ndim, std::size_t n, const Vec& lo, const Vec& hi) {
  Grid g;
  g.ndim = ndim;
  g.shape = {n, n, ndim == 3 ? n : 1};
  for (int a = 0; a < 3; ++a) {
    if (a < ndim) {
      g.spacing[a] = (hi[a] - lo[a]) / static_cast<double>(n);
      g.origin[a] = lo[a] + 0.5 * g.spacing[a];
    } else {
      g.spacing[a] = 1.0;
      g.origin[a] = 0.0;
    }
    g.periodic[a] = false;
  }
  g.validate();
  return g;
}

ScalarField VectorField::component(int a) const {
  ScalarField s(grid);
  s.v = c.at(static_cast<std::size_t>(a));
  return s;
}

void require_finite(const ScalarField& u) {
  if (u.v.size() != u.grid.size()) throw ConfigError("sample count does not match grid");
  for (double x : u.v)
    if (!std::isfinite(x)) throw ConfigError("field contains non-finite samples");
}

void require_finite(const VectorField& f) {
  for (const auto& comp : f.c) {
    if (comp.size() != f.grid.size()) throw ConfigError("sample count does not match grid");
    for (double x : comp)
      if (!std::isfinite(x)) throw ConfigError("field contains non-finite samples");
  }
}

Mask mask_from(const ScalarField& m) {
  Mask out(m.v.size());
  for (std::size_t i = 0; i < m.v.size(); ++i) out[i] = m.v[i] != 0.0 ? 1 : 0;
  return out;
}

namespace {

ScalarField central_partial(const ScalarField& u, int axis) {
  const Grid& g = u.grid;
  const std::size_t N = g.shape[axis], s = g.stride(axis);
  const double h = g.spacing[axis];
  ScalarField out(g);
  const std::size_t total = g.size();
#pragma omp parallel for schedule(static) if (default_exec() == Exec::omp)
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::size_t i = (idx / s) % N;
    const std::size_t base = idx - i * s;
    auto at = [&](std::size_t j) { return u.v[base + j * s]; };
    double d;
    if (g.periodic[axis]) {
      d = (at((i + 1) % N) - at((i + N - 1) % N)) / (2.0 * h);
    } else if (i == 0) {
      d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    } else if (i == N - 1) {
      d = (3.0 * at(N - 1) - 4.0 * at(N - 2) + at(N - 3)) / (2.0 * h);
    } else {
      d = (at(i + 1) - at(i - 1)) / (2.0 * h);
    }
    out.v[idx] = d;
  }
  return out;
}

ScalarField spectral_partial(const ScalarField& u, int axis) {
  const Grid& g = u.grid;
  if (!g.fully_periodic()) throw ConfigError("spectral derivatives need a fully periodic grid");
  detail::RealFft fft(g);
  auto hat = fft.forward(u.v);
  for (std::size_t q = 0; q < hat.size(); ++q) {
    const auto m = fft.unravel(q);
    const double k = fft.wavenumber(axis, m[axis], true);
    hat[q] *= detail::cplx(0.0, k);
  }
  ScalarField out(g);
  out.v = fft.inverse(hat);
  return out;
}

}  // namespace

ScalarField partial(const ScalarField& u, int axis, Scheme scheme) {
  if (axis < 0 || axis >= u.grid.ndim) throw ConfigError("axis out of range");
  return scheme == Scheme::spectral ? spectral_partial(u, axis) : central_partial(u, axis);
}

VectorField gradient(const ScalarField& u, Scheme scheme) {
  if (scheme == Scheme::spectral && !u.grid.fully_periodic())
    throw ConfigError("spectral derivatives need a fully periodic grid");
  VectorField f(u.grid);
  for (int a = 0; a < u.grid.ndim; ++a) f.c[a] = partial(u, a, scheme).v;
  return f;
}

ScalarField divergence(const VectorField& f, Scheme scheme) {
  if (scheme == Scheme::spectral && !f.grid.fully_periodic())
    throw ConfigError("spectral derivatives need a fully periodic grid");
  if (f.ncomp() != f.grid.ndim) throw ConfigError("divergence needs ndim components");
  ScalarField out(f.grid);
  for (int a = 0; a < f.grid.ndim; ++a) {
    ScalarField comp(f.grid);
    comp.v = f.c[a];
    const auto d = partial(comp, a, scheme);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += d.v[i];
  }
  return out;
}

BallIndex ball_index(const Grid& g, const Vec& center, double radius) {
  BallIndex b;
  b.r2 = radius * radius;
  for (int a = 0; a < 3; ++a) {
    if (a >= g.ndim) {
      b.idx[a] = {0};
      b.disp[a] = {0.0};
      continue;
    }
    const long N = static_cast<long>(g.shape[a]);
    const double h = g.spacing[a];
    const long lo = static_cast<long>(std::floor((center[a] - radius - g.origin[a]) / h)) - 1;
    const long hi = static_cast<long>(std::ceil((center[a] + radius - g.origin[a]) / h)) + 1;
    std::vector<std::size_t> cand;
    if (g.periodic[a]) {
      if (hi - lo + 1 >= N) {
        for (long i = 0; i < N; ++i) cand.push_back(static_cast<std::size_t>(i));
      } else {
        for (long i = lo; i <= hi; ++i) cand.push_back(static_cast<std::size_t>(((i % N) + N) % N));
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      }
    } else {
      for (long i = std::max(lo, 0L); i <= std::min(hi, N - 1); ++i) cand.push_back(static_cast<std::size_t>(i));
    }
    for (std::size_t i : cand) {
      const double d = axis_displacement(g, a, g.coord(a, i), center[a]);
      if (d * d <= b.r2) {
        b.idx[a].push_back(i);
        b.disp[a].push_back(d);
      }
    }
  }
  return b;
}

namespace {

void check_radius(const Grid& g, double radius) {
  if (!(radius >= 2.0 * g.max_spacing() * (1.0 - 1e-12)))
    throw DegenerateBallError("ball radius below twice the grid spacing");
}

}  // namespace

double ball_average(const ScalarField& u, const Vec& center, double radius, const Mask* mask) {
  check_radius(u.grid, radius);
  const BallIndex b = ball_index(u.grid, center, radius);
  double sum = 0.0;
  std::size_t count = 0;
  for_each_in_ball(u.grid, b, [&](std::size_t i) {
    if (mask && !(*mask)[i]) return;
    sum += u.v[i];
    ++count;
  });
  if (count == 0) throw DegenerateBallError("ball contains no admissible nodes");
  return sum / static_cast<double>(count);
}

double ball_average(const ScalarField& u, const Vec& center, double radius, const ScalarField& mask) {
  const Mask m = mask_from(mask);
  return ball_average(u, center, radius, &m);
}

bool ball_oscillation(const Grid& g, const std::vector<const double*>& comps, const Mask* mask,
                      const Vec& center, double radius, double& oscillation) {
  const BallIndex b = ball_index(g, center, radius);
  const std::size_t nc = comps.size();
  std::array<double, 3> mean{0, 0, 0};
  std::size_t count = 0;
  for_each_in_ball(g, b, [&](std::size_t i) {
    if (mask && !(*mask)[i]) return;
    for (std::size_t c = 0; c < nc; ++c) mean[c] += comps[c][i];
    ++count;
  });
  if (count == 0) return false;
  for (std::size_t c = 0; c < nc; ++c) mean[c] /= static_cast<double>(count);
  double acc = 0.0;
  for_each_in_ball(g, b, [&](std::size_t i) {
    if (mask && !(*mask)[i]) return;
    if (nc == 1) {
      acc += std::fabs(comps[0][i] - mean[0]);
    } else {
      double s = 0.0;
      for (std::size_t c = 0; c < nc; ++c) {
        const double d = comps[c][i] - mean[c];
        s += d * d;
      }
      acc += std::sqrt(s);
    }
  });
  oscillation = acc / static_cast<double>(count);
  return true;
}

namespace {

double finish_norm(const Grid& g, std::vector<double>& buf, double p) {
  if (p == kInf) {
    double m = 0.0;
    for (double x : buf) m = std::max(m, x);
    return m;
  }
  const double s = g.cell_volume() * tree_sum(buf.data(), buf.size(), default_exec());
  return p == 2.0 ? std::sqrt(s) : p == 1.0 ? s : std::pow(s, 1.0 / p);
}

double power(double a, double p) {
  if (p == kInf || p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

void check_p(double p) {
  if (!(p >= 1.0)) throw ConfigError("lp_norm needs p in [1, inf]");
}

}  // namespace

double lp_norm(const ScalarField& u, double p, const Mask* mask) {
  check_p(p);
  std::vector<double> buf(u.v.size(), 0.0);
  for (std::size_t i = 0; i < buf.size(); ++i)
    if (!mask || (*mask)[i]) buf[i] = power(std::fabs(u.v[i]), p);
  return finish_norm(u.grid, buf, p);
}

double lp_norm(const VectorField& f, double p, const Mask* mask) {
  check_p(p);
  const std::size_t n = f.grid.size();
  std::vector<double> buf(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask && !(*mask)[i]) continue;
    double s = 0.0;
    for (const auto& c : f.c) s += c[i] * c[i];
    buf[i] = p == 2.0 ? s : power(std::sqrt(s), p);
  }
  return finish_norm(f.grid, buf, p);
}

double inner(const VectorField& a, const VectorField& b, const Mask* mask) {
  if (a.ncomp() != b.ncomp() || !(a.grid == b.grid)) throw ConfigError("inner product of mismatched fields");
  const std::size_t n = a.grid.size();
  std::vector<double> buf(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask && !(*mask)[i]) continue;
    double s = 0.0;
    for (int c = 0; c < a.ncomp(); ++c) s += a.c[c][i] * b.c[c][i];
    buf[i] = s;
  }
  return a.grid.cell_volume() * tree_sum(buf.data(), n, default_exec());
}

double inner(const ScalarField& a, const ScalarField& b, const Mask* mask) {
  if (!(a.grid == b.grid)) throw ConfigError("inner product of mismatched fields");
  std::vector<double> buf(a.v.size(), 0.0);
  for (std::size_t i = 0; i < buf.size(); ++i)
    if (!mask || (*mask)[i]) buf[i] = a.v[i] * b.v[i];
  return a.grid.cell_volume() * tree_sum(buf.data(), buf.size(), default_exec());
}

ScalarField synth_field(const Grid& grid, double decay, std::uint64_t seed) {
  grid.validate();
  if (!grid.fully_periodic()) throw ConfigError("synth_field needs a fully periodic grid");
  Rng rng(seed);
  std::vector<double> noise(grid.size());
  for (double& x : noise) x = rng.normal();
  detail::RealFft fft(grid);
  auto hat = fft.forward(noise);
  for (std::size_t q = 0; q < hat.size(); ++q) {
    const auto m = fft.unravel(q);
    double k2 = 0.0;
    bool band = true;
    for (int a = 0; a < grid.ndim; ++a) {
      const std::size_t N = grid.shape[a];
      const long ms = (a != grid.ndim - 1 && m[a] > N / 2) ? static_cast<long>(m[a]) - static_cast<long>(N)
                                                           : static_cast<long>(m[a]);
      if (static_cast<std::size_t>(std::labs(ms)) * 4 > N) band = false;
      const double k = 2.0 * kPi * static_cast<double>(ms) / grid.length(a);
      k2 += k * k;
    }
    hat[q] = (band && k2 > 0.0) ? hat[q] * std::pow(k2, -0.5 * decay) : detail::cplx(0.0, 0.0);
  }
  ScalarField u(grid);
  u.v = fft.inverse(hat);
  const double n2 = lp_norm(u, 2.0);
  if (n2 > 0.0)
    for (double& x : u.v) x /= n2;
  return u;
}

ScalarField sample(const Grid& g, const std::function<double(const Vec&)>& fn) {
  ScalarField u(g);
  for (std::size_t i = 0; i < u.v.size(); ++i) u.v[i] = fn(g.node(i));
  return u;
}

VectorField sample(const Grid& g, const std::function<Vec(const Vec&)>& fn) {
  VectorField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec v = fn(g.node(i));
    for (int a = 0; a < g.ndim; ++a) f.c[a][i] = v[a];
  }
  return f;
}

VectorField sample_on_faces(const Grid& g, const std::function<Vec(const Vec&)>& fn) {
  VectorField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int a = 0; a < g.ndim; ++a) {
      Vec x = g.node(i);
      x[a] += 0.5 * g.spacing[a];
      f.c[a][i] = fn(x)[a];
    }
  }
  return f;
}

// ---- VBMO1 -----------------------------------------------------------------

namespace {

constexpr std::uint8_t kMagic[5] = {0x56, 0x42, 0x4D, 0x4F, 0x31};

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw FormatError("VBMO1 file truncated");
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_vbmo(const Grid& grid, const std::vector<std::vector<double>>& comps) {
  grid.validate();
  if (comps.empty() || comps.size() > 255) throw FormatError("VBMO1 needs 1..255 components");
  for (const auto& c : comps)
    if (c.size() != grid.size()) throw FormatError("component size does not match grid");
  std::vector<std::uint8_t> out(kMagic, kMagic + 5);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(grid.ndim));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(comps.size()));
  for (int a = 0; a < grid.ndim; ++a) put<std::uint64_t>(out, grid.shape[a]);
  for (int a = 0; a < grid.ndim; ++a) put<double>(out, grid.spacing[a]);
  for (int a = 0; a < grid.ndim; ++a) put<double>(out, grid.origin[a]);
  for (int a = 0; a < grid.ndim; ++a) put<std::uint8_t>(out, grid.periodic[a] ? 1 : 0);
  out.reserve(out.size() + grid.size() * comps.size() * 8);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (const auto& c : comps) put<double>(out, c[i]);
  return out;
}

FieldFile decode_vbmo(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 7 || !std::equal(kMagic, kMagic + 5, bytes.begin())) throw FormatError("not a VBMO1 file");
  std::size_t pos = 5;
  FieldFile f;
  const int ndim = get<std::uint8_t>(bytes, pos);
  const int ncomp = get<std::uint8_t>(bytes, pos);
  if (ndim != 2 && ndim != 3) throw FormatError("VBMO1 dimension must be 2 or 3");
  if (ncomp < 1) throw FormatError("VBMO1 needs at least one component");
  Grid& g = f.grid;
  g.ndim = ndim;
  g.shape = {1, 1, 1};
  g.spacing = {1, 1, 1};
  g.origin = {0, 0, 0};
  g.periodic = {false, false, false};
  for (int a = 0; a < ndim; ++a) {
    const auto s = get<std::uint64_t>(bytes, pos);
    if (s == 0 || s > (1ull << 31)) throw FormatError("VBMO1 shape out of range");
    g.shape[a] = static_cast<std::size_t>(s);
  }
  for (int a = 0; a < ndim; ++a) g.spacing[a] = get<double>(bytes, pos);
  for (int a = 0; a < ndim; ++a) g.origin[a] = get<double>(bytes, pos);
  for (int a = 0; a < ndim; ++a) g.periodic[a] = get<std::uint8_t>(bytes, pos) != 0;
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("VBMO1 header: ") + e.what());
  }
  const std::size_t n = g.size();
  if (bytes.size() - pos != n * static_cast<std::size_t>(ncomp) * 8) throw FormatError("VBMO1 payload size mismatch");
  f.comps.assign(static_cast<std::size_t>(ncomp), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < ncomp; ++c) f.comps[c][i] = get<double>(bytes, pos);
  return f;
}

void write_vbmo(const std::string& path, const Grid& grid, const std::vector<std::vector<double>>& comps) {
  const auto bytes = encode_vbmo(grid, comps);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw FormatError("write failed: " + path);
}

void write_vbmo(const std::string& path, const ScalarField& u) { write_vbmo(path, u.grid, {u.v}); }
void write_vbmo(const std::string& path, const VectorField& f) { write_vbmo(path, f.grid, f.c); }

FieldFile read_vbmo(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_vbmo(bytes);
}

}  // namespace vbmo
