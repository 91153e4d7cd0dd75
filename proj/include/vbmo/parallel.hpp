// Execution policy and deterministic reductions.
//
// Every parallel kernel writes per-item results into a buffer; reductions then
// run over a fixed pairwise tree whose shape depends only on the item count,
// so results do not depend on the number of worker threads.
#pragma once

#include <cstddef>
#include <vector>

namespace vbmo {

enum class Exec { serial, omp };

// Process-wide default used by entry points that do not take an Exec.
Exec default_exec();
void set_default_exec(Exec e);
void set_num_threads(int n);
int max_threads();

// Pairwise sum with leaves of kLeaf consecutive terms.
inline constexpr std::size_t kLeaf = 256;
double tree_sum(const double* x, std::size_t n);
inline double tree_sum(const std::vector<double>& x) { return tree_sum(x.data(), x.size()); }

// Same tree as tree_sum, leaves evaluated in parallel when e == Exec::omp.
double tree_sum(const double* x, std::size_t n, Exec e);

}  // namespace vbmo
