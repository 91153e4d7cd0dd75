// Aggregation multigrid V-cycle for the masked Neumann Laplacian, used as a
// fixed symmetric preconditioner inside CG.
#pragma once

#include <array>
#include <vector>

#include "vbmo/fields.hpp"
#include "vbmo/parallel.hpp"

namespace vbmo {

class AggregationMultigrid {
 public:
  // Unknowns are the masked nodes in ascending grid order, as in MaskedLaplacian.
  AggregationMultigrid(const Grid& g, const Mask& mask);
  // z = B r with B symmetric positive semidefinite; r and z have size().
  void apply(const double* r, double* z, Exec exec) const;
  std::size_t size() const { return levels_.empty() ? 0 : levels_.front().n; }
  int depth() const { return static_cast<int>(levels_.size()); }

 private:
  struct Level {
    std::size_t n = 0;
    int deg = 0;
    std::vector<long> nbr;            // n * deg, -1 for no coupling
    std::vector<double> w, diag;
    std::array<std::size_t, 3> shape{1, 1, 1};
    std::array<bool, 3> periodic{false, false, false};
    std::vector<std::size_t> flat;    // level-grid index of each compact node
    std::vector<long> parent;         // compact index on the next level
    std::vector<std::size_t> child_start, children;  // CSR gather list from the previous level
  };
  void apply_operator(const Level& L, const double* x, double* y, Exec exec) const;
  void smooth(const Level& L, const double* b, double* x, double* tmp, Exec exec) const;
  void vcycle(std::size_t l, const double* b, double* x, Exec exec) const;

  std::vector<Level> levels_;
  int ndim_ = 2;
};

}  // namespace vbmo
