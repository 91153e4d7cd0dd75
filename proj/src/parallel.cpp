#include "vbmo/parallel.hpp"

#include <atomic>
#include <omp.h>

namespace vbmo {

namespace {
std::atomic<Exec> g_exec{Exec::omp};

double pairwise(const std::vector<double>& leaves) {
  std::vector<double> level = leaves;
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next[i / 2] = level[i] + level[i + 1];
    if (level.size() % 2) next.back() = level.back();
    level.swap(next);
  }
  return level.empty() ? 0.0 : level[0];
}
}  // namespace

Exec default_exec() { return g_exec.load(); }
void set_default_exec(Exec e) { g_exec.store(e); }
void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}
int max_threads() { return omp_get_max_threads(); }

double tree_sum(const double* x, std::size_t n) { return tree_sum(x, n, Exec::serial); }

double tree_sum(const double* x, std::size_t n, Exec e) {
  const std::size_t nleaf = (n + kLeaf - 1) / kLeaf;
  std::vector<double> leaves(nleaf, 0.0);
  const long long L = static_cast<long long>(nleaf);
  if (e == Exec::omp) {
#pragma omp parallel for schedule(static)
    for (long long l = 0; l < L; ++l) {
      double s = 0.0;
      const std::size_t b = static_cast<std::size_t>(l) * kLeaf;
      const std::size_t end = b + kLeaf < n ? b + kLeaf : n;
      for (std::size_t i = b; i < end; ++i) s += x[i];
      leaves[static_cast<std::size_t>(l)] = s;
    }
  } else {
    for (long long l = 0; l < L; ++l) {
      double s = 0.0;
      const std::size_t b = static_cast<std::size_t>(l) * kLeaf;
      const std::size_t end = b + kLeaf < n ? b + kLeaf : n;
      for (std::size_t i = b; i < end; ++i) s += x[i];
      leaves[static_cast<std::size_t>(l)] = s;
    }
  }
  return pairwise(leaves);
}

}  // namespace vbmo
