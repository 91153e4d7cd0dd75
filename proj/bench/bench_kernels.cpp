// Serial reference against OpenMP kernels; both produce bitwise equal results.
#include <benchmark/benchmark.h>

#include "vbmo/helmholtz.hpp"

using namespace vbmo;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::omp : Exec::serial; }

void label(benchmark::State& s) { s.SetLabel(s.range(1) ? "omp" : "serial"); }

void BM_BallSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DomainSpec spec = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(2, n, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const Region R = region_from_spec(spec, g);
  const BallSet balls = make_ball_set(R, kInf, BallPolicySpec{});
  const VectorField f = sample(g, corpus_function(2, spec.box_lo, spec.box_hi, 1));
  for (auto _ : state) benchmark::DoNotOptimize(bmo_seminorm(f, R, balls, exec_of(state)).value);
  label(state);
}

void BM_LaplacianMatvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = Grid::box(3, n, {-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
  const MaskedLaplacian A(g, domain_mask(DomainSpec::ball(3, {0, 0, 0}, 0.4), g));
  std::vector<double> x(A.size()), y(A.size());
  Rng rng(3);
  for (double& v : x) v = rng.normal();
  for (auto _ : state) {
    A.apply(x.data(), y.data(), exec_of(state));
    benchmark::DoNotOptimize(y.data());
  }
  label(state);
}

void BM_NeumannSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DomainSpec spec = DomainSpec::ball(3, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(3, n, {-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
  const VectorField f = theorem_corpus(g, spec.box_lo, spec.box_hi, 1, 4).front();
  NeumannOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(project_domain(f, spec, opt).solve.iterations);
  label(state);
}

void BM_Bogovskii(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = Grid::box(2, n, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const StarDomain d = star_ball(g, {0, 0, 0}, 0.4, 0.2);
  const ScalarField data = sample(g, [](const Vec& x) {
    const double t = (x[0] * x[0] + x[1] * x[1]) / 0.09;
    return t < 1.0 ? x[0] * std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
  });
  BogovskiiOptions opt;
  opt.exec = exec_of(state);
  opt.check_star = false;
  for (auto _ : state) benchmark::DoNotOptimize(bogovskii(data, d, opt).div_residual);
  label(state);
}

}  // namespace

BENCHMARK(BM_BallSweep)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LaplacianMatvec)->ArgsProduct({{48, 96}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NeumannSolve)->ArgsProduct({{32, 48}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bogovskii)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
