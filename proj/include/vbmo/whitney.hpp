// Dyadic Whitney decompositions on a raster of 2^depth cells per axis, the
// chain and logarithmic cube distances, and the Jones extension of functions
// given on the cells of the set.
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vbmo/domains.hpp"

namespace vbmo {

// Cells of the cube [lo, lo + length]^n at resolution 2^depth per axis. A cell
// belongs to the open set when its flag is set. With box_is_complement the
// outside of the box also counts as complement; otherwise the set is its
// cells plus everything beyond the box that the raster does not see.
struct CellSet {
  int ndim = 2;
  int depth = 6;
  Vec lo{0, 0, 0};
  double length = 1.0;
  Mask cells;
  bool box_is_complement = true;

  long n() const { return 1L << depth; }
  double cell() const { return length / static_cast<double>(n()); }
  std::size_t size() const;
  std::size_t index(const std::array<long, 3>& c) const;
  std::array<long, 3> unravel(std::size_t i) const;
  // Cell-centred grid whose nodes are the cell centres.
  Grid grid() const;
  std::size_t count() const;
};

CellSet cell_set(int ndim, int depth, const Vec& lo, double length, const std::function<bool(const Vec&)>& inside,
                 bool box_is_complement = true);
CellSet cell_set(const DomainSpec& spec, int depth, const Vec& lo, double length);
// Complement of D inside the box, with the box exterior not treated as
// complement (the open set D^c continues past the box).
CellSet complement_in_box(const CellSet& d);

// Planar test sets inside a box of the given side.
namespace shapes {
CellSet cube(int ndim, int depth);            // (1/4, 3/4)^n in [0, 1]^n
CellSet ball(int ndim, int depth);            // B_{0.4}(1/2)
CellSet l_shape(int depth);                   // 2-D
CellSet annulus(int depth);                   // 2-D, radii 0.2 and 0.45
CellSet corridor_pair(int depth, double width);  // 2-D squares joined by a corridor
}  // namespace shapes

struct WhitneyCube {
  int level = 0;                         // side = length * 2^-level
  std::array<long, 3> coords{0, 0, 0};   // position in units of the side
  double side = 0.0;
  long dist2 = 0;                        // squared distance to the complement in cell units
  double distance = 0.0;                 // physical distance to the complement
};

// Lexicographic order (level, coords): the deterministic tie-break.
bool cube_less(const WhitneyCube& a, const WhitneyCube& b);

struct WhitneyDecomposition {
  CellSet set;
  std::vector<WhitneyCube> cubes;
  std::vector<std::vector<int>> adjacency;  // touching closed cubes, ascending
  std::vector<int> owner;                   // cell -> cube id or -1
  std::vector<std::size_t> collar;          // cells of the set left uncovered at the depth cap
};

// Stein's recursion on dyadic cubes. Every emitted cube Q satisfies
// n l^2 <= d(Q, F)^2 <= 16 n l^2 in exact integer arithmetic.
WhitneyDecomposition whitney_decompose(const CellSet& set);

// Squared distance, in cell units, from every corner lattice point to the
// complement corners; exact integers.
std::vector<long> complement_edt(const CellSet& set);

struct WhitneyCheck {
  bool separation_ok = true;   // sqrt(n) <= d/l <= 4 sqrt(n)
  bool neighbor_ok = true;     // touching sides within a factor 4
  bool disjoint_ok = true;
  double min_ratio = kInf, max_ratio = 0.0;
  int max_level_jump = 0;
};
WhitneyCheck check_whitney(const WhitneyDecomposition& w);

inline constexpr int kNoChain = std::numeric_limits<int>::max();

// Fewest steps between cubes through the touching graph; kNoChain when they
// lie in different components.
int chain_distance(const WhitneyDecomposition& w, int j, int k);
std::vector<int> chain_distances_from(const WhitneyDecomposition& w, int j);

// Euclidean gap between two closed cubes.
double cube_gap(const WhitneyCube& a, const WhitneyCube& b);
// |log(l_j / l_k)| + log(gap / (l_j + l_k) + 1).
double log_distance(const WhitneyCube& a, const WhitneyCube& b);

struct KStarEstimate {
  double kstar = 0.0;
  int j = -1, k = -1;
  int d1 = 0;
  double d2 = 0.0;
  int pairs = 0;
  bool connected = true;
};
KStarEstimate estimate_kstar(const WhitneyDecomposition& w, int sample_pairs, std::uint64_t seed = 29);

// Which cube of W each exterior cube copies its average from.
struct JonesPlan {
  double delta = 0.0;
  int k_delta = 0;
  double big_side = 0.0;                // 2^-k_delta; W cubes above this form h*
  std::vector<int> match;               // per W' cube: W cube id or -1 (beyond D_delta)
  std::vector<std::size_t> collar_cells;  // uncovered exterior cells, treated as one-cell cubes
  std::vector<int> collar_match;
  std::vector<int> count;               // per W cube: number of W' cubes matched to it
  int max_count = 0;
  double count_bound = 0.0;             // (2^n + 1) 67^n K*^(2n)
  double kstar = 0.0;
  std::string warning;
};
JonesPlan jones_plan(const WhitneyDecomposition& w, const WhitneyDecomposition& wc, double delta, double kstar,
                     double kstar_cap = 1e6);

struct ExtensionResult {
  ScalarField ext;        // on set.grid()
  ScalarField h_star;
  JonesPlan plan;
  double delta = 0.0;
  bool restriction_exact = false;
  bool support_ok = false;
  double h_star_sup = 0.0;
  double h_star_ratio = 0.0;  // ||h*||_inf / (delta^(-n/r) ||g||_{L^r(D)})
};

// g lives on the cell-centred grid of the set; values outside D are ignored.
ExtensionResult jones_extend(const ScalarField& g, double r, const WhitneyDecomposition& w,
                             const WhitneyDecomposition& wc, const JonesPlan& plan);
ExtensionResult jones_extend(const ScalarField& g, double r, double delta, const WhitneyDecomposition& w,
                             const WhitneyDecomposition& wc, int kstar_pairs = 400);

}  // namespace vbmo
