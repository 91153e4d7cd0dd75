// BMO, b and vBMO seminorms over ball families, and the inequality audits
// built on them.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vbmo/domains.hpp"

namespace vbmo {

struct Ball {
  Vec c{0, 0, 0};
  double r = 0.0;
};

// Lexicographic order on (center, radius); used to break argmax ties.
bool ball_less(const Ball& a, const Ball& b);

// Where balls may be placed: the node mask of the domain and a containment
// predicate for closed balls.
struct Region {
  Grid grid;
  Mask mask;
  std::function<bool(const Vec&, double)> contains;
  double diameter = 0.0;
};
Region region_from_spec(const DomainSpec& spec, const Grid& grid);
Region region_from_mask(const Grid& grid, const Mask& mask);

enum class BallPolicy { exhaustive, lattice, random };

struct BallPolicySpec {
  BallPolicy kind = BallPolicy::lattice;
  int levels = 4;            // dyadic radius levels (lattice)
  // Calibrated so the lattice sup stays within 0.9 of exhaustive on 32^2 grids.
  int radii_per_level = 6;
  double center_stride = 0.25;  // lattice center spacing relative to the level radius
  int random_count = 256;    // extra seeded random balls (lattice and random)
  std::uint64_t seed = 17;
};

struct BallSet {
  std::vector<Ball> balls;
  double mu = kInf;
};

// Distinct node-to-node distances r with 2h <= r < mu, slightly inflated so the
// closed-ball test includes the ring at exactly that distance.
std::vector<double> exhaustive_radii(const Grid& g, double mu);
double effective_mu(const Region& region, double mu);
BallSet make_ball_set(const Region& region, double mu, const BallPolicySpec& policy);
// Physical balls (e.g. generated on a coarser grid) snapped to this region's
// nodes and filtered by admissibility.
BallSet snap_ball_set(const Region& region, const std::vector<Ball>& balls, double mu);

struct SupResult {
  double value = 0.0;
  Ball ball;
  bool found = false;
};

SupResult bmo_seminorm(const Region& region, const std::vector<const double*>& comps, const BallSet& balls,
                       Exec exec = default_exec());
SupResult bmo_seminorm(const ScalarField& u, const Region& region, const BallSet& balls, Exec exec = default_exec());
SupResult bmo_seminorm(const VectorField& f, const Region& region, const BallSet& balls, Exec exec = default_exec());

// Exhaustive sup over every admissible (node center, radius) pair with its own
// enumeration loops; refuses grids above 4096 nodes.
double brute_force_bmo(const ScalarField& u, const Region& region, double mu);
double brute_force_bmo(const VectorField& f, const Region& region, double mu);
inline constexpr std::size_t kBruteForceCap = 4096;

// Boundary points and radii for the b seminorm.
struct BoundarySet {
  std::vector<Vec> points;
  std::vector<double> radii;
  double nu = kInf;
};
BoundarySet make_boundary_set(const DomainSpec& spec, const Grid& grid, double nu, int per_axis = 16);

// r^{-n} * sum over nodes of B_r(x) in the mask of |grad d . f| * cell volume.
double b_integral(const VectorField& f, const SignedDistanceField& sdf, const Mask& mask, const Vec& x, double r);
struct BSupResult {
  double value = 0.0;
  Vec point{0, 0, 0};
  double radius = 0.0;
  bool found = false;
};
BSupResult b_seminorm(const VectorField& f, const SignedDistanceField& sdf, const Mask& mask, const BoundarySet& set,
                      Exec exec = default_exec());
// Same for a scalar g standing in for grad d . f.
BSupResult b_seminorm_scalar(const ScalarField& g, const Mask& mask, const BoundarySet& set, Exec exec = default_exec());

struct SeminormReport {
  double bmo = 0.0;
  double b = 0.0;
  double l2 = 0.0;
  double vbmo = 0.0;   // bmo + b
  double norm = 0.0;   // vbmo + l2
  Ball bmo_ball;
  Vec b_point{0, 0, 0};
  double b_radius = 0.0;
  double mu = kInf, nu = kInf;
  std::string remark;
};

// Everything needed to evaluate the vBMO norm on one grid.
struct SeminormContext {
  DomainSpec spec;
  Region region;
  BallSet balls;
  SignedDistanceField sdf;
  BoundarySet bset;
  double mu = kInf, nu = kInf;
};
SeminormContext make_context(const DomainSpec& spec, const Grid& grid, double mu, double nu,
                             const BallPolicySpec& policy = {});

SeminormReport vbmo_norm(const VectorField& f, const SeminormContext& ctx, Exec exec = default_exec());

// [u]_BMO + ||u||_{L^r} over the region.
double bmol_norm(const ScalarField& u, double r, const SeminormContext& ctx);

// ||u||_{L^q} / (q ||u||_{BMOL^r}).
double interpolation_constant(const ScalarField& u, double r, double q, const SeminormContext& ctx);

// ||phi v||_{BMOL^r} / (||phi||_{C^gamma} ||v||_{BMOL^r}); the Hoelder norm is
// sup|phi| plus the sampled Hoelder quotient over node pairs.
double holder_norm(const ScalarField& phi, double gamma, const Mask& mask, int pairs = 4000, std::uint64_t seed = 23);
double multiplication_audit(const ScalarField& phi, const ScalarField& v, double r, double gamma,
                            const SeminormContext& ctx);

// [g]_{BMO} / ||grad g||_{L^n}.
double w1n_embedding_audit(const ScalarField& g, const SeminormContext& ctx);

}  // namespace vbmo
