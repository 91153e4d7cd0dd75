// Helmholtz projections (spectral whole space, reflected half space, masked
// Neumann finite volumes), the star-shaped divergence solver, the localization
// identities and the end-to-end stability audit of the vBMO estimate.
//
// Masked-domain fields are staggered: component a stored at node i is the
// value on the face between nodes i and i + e_a. A face is interior when both
// nodes lie in the mask and a boundary face when exactly one does.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vbmo/cutoffs.hpp"
#include "vbmo/seminorms.hpp"

namespace vbmo {

struct Diagnostics {
  double div_residual = 0.0;         // relative L2 divergence of f0
  double normal_trace = 0.0;         // boundary-normal trace of f0 (see each method)
  double orthogonality = 0.0;        // <f0, grad p> / ||f||^2
  double reconstruction_error = 0.0; // max |f0 + grad p - f| / max |f|
};

struct NeumannSolveReport {
  int iterations = 0;
  double residual = 0.0;   // final ||r|| / ||b||
  double defect = 0.0;     // integral of the data before mean projection
  bool converged = false;
};

struct DecompositionResult {
  VectorField f0, grad_p;
  ScalarField p;
  Diagnostics diag;
  NeumannSolveReport solve;
  std::string method;
};

// Modes whose gradient part is below this fraction of the largest mode are
// treated as already solenoidal; with every mode below it the input is
// returned unchanged, so the projector is idempotent bitwise.
inline constexpr double kSolenoidalThreshold = 1e-12;

DecompositionResult project_whole_space(const VectorField& f);

// Slab grid: periodic tangential axes, cell-centred normal axis whose lower
// boundary face sits half a cell below the first node row.
DecompositionResult project_half_space(const VectorField& f, int normal_axis = -1);
// Even tangential / odd normal extension to the doubled periodic grid.
VectorField reflect_to_doubled(const VectorField& f, int normal_axis);
// Pointwise mean of a doubled field and its reflection.
VectorField symmetrize_doubled(const VectorField& F, int normal_axis, bool even_scalar = false);
VectorField restrict_from_doubled(const VectorField& F, int normal_axis, std::size_t n_normal);

// ---- staggered calculus on a mask ----

enum class FaceKind : std::uint8_t { none, interior, boundary };
FaceKind face_kind(const Grid& g, const Mask& mask, std::size_t i, int axis);
// Sum of face fluxes per masked node; interior_only drops boundary faces.
ScalarField face_divergence(const VectorField& F, const Mask& mask, bool interior_only);
// Forward difference on interior faces, zero elsewhere.
VectorField face_gradient(const ScalarField& p, const Mask& mask);
// Volume-weighted sums over interior and boundary faces.
double face_inner(const VectorField& a, const VectorField& b, const Mask& mask);
double face_max(const VectorField& a, const Mask& mask);
// Node value per component: mean of the live faces on either side.
VectorField faces_to_nodes(const VectorField& F, const Mask& mask);
// Largest plaquette circulation density |D_a F_b - D_b F_a| over interior faces.
double face_curl_max(const VectorField& F, const Mask& mask);

// Negative masked Laplacian with homogeneous Neumann walls, on the masked
// nodes only (compact numbering, ascending grid index).
class MaskedLaplacian {
 public:
  MaskedLaplacian(const Grid& g, const Mask& mask);
  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::size_t>& nodes() const { return nodes_; }
  const std::vector<double>& diagonal() const { return diag_; }
  void apply(const double* x, double* y, Exec exec = default_exec()) const;

 private:
  int deg_;
  std::vector<std::size_t> nodes_;
  std::vector<long> nbr_;
  std::vector<double> w_, diag_;
};

enum class Preconditioner { jacobi, multigrid };

struct NeumannOptions {
  double tol = 1e-10;
  // Jacobi is the simple reference; multigrid is an aggregation V-cycle.
  Preconditioner precond = Preconditioner::multigrid;
  int max_iter = 20000;
  Exec exec = default_exec();
};

// div F = g_rhs with F = grad p on interior faces and F = g_bdry on boundary
// faces; preconditioned CG on the mean-zero subspace of each component.
std::pair<ScalarField, NeumannSolveReport> solve_neumann(const Grid& grid, const Mask& mask, const ScalarField& g_rhs,
                                                         const VectorField& g_bdry, const NeumannOptions& opt = {});
std::pair<ScalarField, NeumannSolveReport> solve_neumann(const DomainSpec& spec, const Grid& grid,
                                                         const ScalarField& g_rhs, const VectorField& g_bdry,
                                                         const NeumannOptions& opt = {});

// f given on faces; f0 vanishes on boundary faces, grad p equals f there.
DecompositionResult project_domain(const VectorField& f, const DomainSpec& spec, const NeumannOptions& opt = {});
DecompositionResult project_domain(const VectorField& f, const Mask& mask, const NeumannOptions& opt = {});

// ---- star-shaped divergence solver ----

struct StarDomain {
  Grid grid;
  Mask mask;                                      // nodes of D
  std::function<bool(const Vec&)> inside;         // membership for the ray audit
  Vec x0{0, 0, 0};
  double R = 0.0;
  double diameter = 0.0;
};
StarDomain star_ball(const Grid& g, const Vec& center, double radius, double core);

// Every sampled ray from the core crosses the boundary exactly once.
bool star_like(const StarDomain& d, int rays, std::uint64_t seed = 19);

struct BogovskiiOptions {
  double q = 2.0;
  int star_rays = 128;
  bool check_star = true;
  double mean_tol = 1e-10;
  Exec exec = default_exec();
};

struct BogovskiiResult {
  VectorField u;            // nodes; zero off the mask
  double div_residual = 0.0;  // ||div u - g||_2 / ||g||_2, central differences
  double ratio = 0.0;         // ||u||_{W^{1,q}} / ||g||_q
  double trace_max = 0.0;     // max |u| on nodes outside D
  double flux = 0.0;          // integral of div u minus integral of g
};

// u(x) = sum_y g(y) (x - y) |x - y|^-n * int_{|x-y|}^inf omega(y + s e) s^(n-1) ds,
// e = (x - y)/|x - y|, omega the unit-mass bump on B_R(x0); the ray integral
// uses 16-point Gauss-Legendre on the chord inside the core.
BogovskiiResult bogovskii(const ScalarField& g, const StarDomain& d, const BogovskiiOptions& opt = {});

// (delta/R)^n (1 + delta/R): the shape of the operator-norm bound.
double bogovskii_shape_bound(int n, double delta, double R);

// Smallest localization cap on epsilon from the domain constants.
double epsilon_cap(const DomainSpec& spec);

// ---- localization identities ----

struct IdentityRecord {
  double residual = 0.0;        // max over interior faces of |lhs - rhs|
  double f_scale = 0.0;         // max |f| over live faces
  double relative = 0.0;        // residual / f_scale
  // max |(grad phi(face midpoint) - D phi) (p - M)| / f_scale: the quadrature
  // gap between the continuous and the discrete product rule, O(h^2)
  double consistency = 0.0;
  double mean_defect = 0.0;     // sum of grad phi . f0 over faces, times cell volume
  double bogovskii_defect = 0.0;
  double M = 0.0;
  double norm_phi_f = 0.0, norm_grad_phi_p = 0.0, norm_omega = 0.0;
  double b_term = 0.0;          // boundary only: b-seminorm of grad d . grad phi (p - M)
  int faces = 0;
};

IdentityRecord localized_interior_identity(const VectorField& f, const DecompositionResult& dec, const DomainSpec& spec,
                                           const Vec& x, double eps);
IdentityRecord localized_boundary_identity(const VectorField& f, const DecompositionResult& dec,
                                           const DomainSpec& spec, const Vec& z0, double eps);

// ---- end-to-end audit ----

// Deterministic smooth vector fields: random low-mode Fourier sums over the
// bounding box, sampled on faces. The same seed gives the same function on
// every grid.
std::vector<VectorField> theorem_corpus(const Grid& g, const Vec& lo, const Vec& hi, int count, std::uint64_t seed);
std::function<Vec(const Vec&)> corpus_function(int ndim, const Vec& lo, const Vec& hi, std::uint64_t seed);

struct TheoremOptions {
  double eps = 0.05;
  BallPolicySpec policy{BallPolicy::lattice, 4, 3, 1.0, 64, 17};
  std::optional<Grid> reference_grid;   // balls are generated here, then snapped
  std::optional<std::vector<Ball>> balls;        // explicit physical balls (overrides)
  std::optional<std::vector<Ball>> small_balls;  // explicit boundary-split balls
  std::optional<std::vector<Vec>> boundary_points;
  NeumannOptions solver;
};

struct SplitReport {
  double interior_bmo = 0.0;  // balls inside Omega_{2 eps}
  double boundary_bmo = 0.0;  // balls of radius < eps centred within 3 eps of the boundary
  double b_eps = 0.0;
};

struct TheoremFieldReport {
  double n_f = 0.0, n_f0 = 0.0, n_gp = 0.0;
  double c_emp = 0.0;
  SplitReport f0, gp;
  Diagnostics diag;
  NeumannSolveReport solve;
};

struct TheoremReport {
  std::vector<TheoremFieldReport> fields;
  double max_c = 0.0;
  double eps = 0.0, eps_cap = 0.0;
  bool eps_compliant = false;
  bool dimension_hypothesis = false;   // n >= 3
  std::string label;
  std::vector<Ball> balls, small_balls;
  std::vector<Vec> boundary_points;
};

TheoremReport verify_main_theorem(const std::vector<VectorField>& corpus, const DomainSpec& spec,
                                  const TheoremOptions& opt = {});

enum class FieldClass { solenoidal, gradient, mixed };
std::string class_name(FieldClass c);

struct Classification {
  FieldClass kind = FieldClass::mixed;
  double div_rel = 0.0, trace_rel = 0.0, curl_rel = 0.0;
  double f0_rel = 0.0, gp_rel = 0.0;
  bool agrees = false;
  std::vector<double> potential_lr;   // max over subboxes of ||p||_{L^r}, r in {2, 2n}
  bool potential_finite = false;
};
Classification characterize_subspaces(const VectorField& v, const DomainSpec& spec, double tol = 1e-8,
                                      std::uint64_t seed = 31);

}  // namespace vbmo
