// Domain descriptions, boundary graphs and charts, signed distance, reach and
// the local geometric audits used by the boundary estimates.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vbmo/fields.hpp"

namespace vbmo {

// A boundary graph x_n = h(y) over the first m = n-1 coordinates of y.
class GraphFn {
 public:
  virtual ~GraphFn() = default;
  virtual int dim() const = 0;
  virtual double h(const Vec& y) const = 0;
  virtual Vec grad(const Vec& y) const = 0;
  virtual Mat hess(const Vec& y) const = 0;
  // Radius of a ball about 0 outside which h vanishes (kInf if not compact).
  virtual double support() const { return kInf; }
};
using GraphPtr = std::shared_ptr<const GraphFn>;

class FlatGraph : public GraphFn {
 public:
  explicit FlatGraph(int m) : m_(m) {}
  int dim() const override { return m_; }
  double h(const Vec&) const override { return 0.0; }
  Vec grad(const Vec&) const override { return {0, 0, 0}; }
  Mat hess(const Vec&) const override { return Mat{}; }
  double support() const override { return 0.0; }

 private:
  int m_;
};

// Sum of compact bumps a * b(|y - c| / w), b(t) = exp(1 - 1/(1 - t^2)), plus an
// affine part offset + slope . y (zero unless normalized()).
struct Bump {
  Vec center{0, 0, 0};
  double amplitude = 0.0;
  double width = 1.0;
};

class RadialSumGraph : public GraphFn {
 public:
  RadialSumGraph(int m, std::vector<Bump> bumps) : m_(m), bumps_(std::move(bumps)) {}
  int dim() const override { return m_; }
  double h(const Vec& y) const override;
  Vec grad(const Vec& y) const override;
  Mat hess(const Vec& y) const override;
  double support() const override;
  const std::vector<Bump>& bumps() const { return bumps_; }
  // Copy with h(0) = 0 and grad h(0) = 0 (subtracts the tangent plane at 0).
  std::shared_ptr<RadialSumGraph> normalized() const;

 private:
  int m_;
  std::vector<Bump> bumps_;
  double offset_ = 0.0;
  Vec slope_{0, 0, 0};
};

// Lower cap of the sphere of radius R centred at (0', R): R - sqrt(R^2 - |y|^2).
class SphereCapGraph : public GraphFn {
 public:
  SphereCapGraph(int m, double R) : m_(m), R_(R) {}
  int dim() const override { return m_; }
  double h(const Vec& y) const override;
  Vec grad(const Vec& y) const override;
  Mat hess(const Vec& y) const override;

 private:
  int m_;
  double R_;
};

// theta(|y| / rho) * base(y).
class TaperedGraph : public GraphFn {
 public:
  TaperedGraph(GraphPtr base, double rho) : base_(std::move(base)), rho_(rho) {}
  int dim() const override { return base_->dim(); }
  double h(const Vec& y) const override;
  Vec grad(const Vec& y) const override;
  Mat hess(const Vec& y) const override;
  double support() const override { return 2.0 * rho_; }

 private:
  GraphPtr base_;
  double rho_;
};

// Local frame at z0: x_global = z0 + rot * x_local, with rot's columns the
// local axes. Locally the domain is {x_n > graph(x')}.
struct Chart {
  int ndim = 2;
  Vec z0{0, 0, 0};
  Mat rot = identity();
  GraphPtr graph;

  Vec to_local(const Vec& x) const { return matTvec(rot, x - z0); }
  Vec to_global(const Vec& xl) const { return z0 + matvec(rot, xl); }
  Vec dir_to_global(const Vec& v) const { return matvec(rot, v); }
  Vec dir_to_local(const Vec& v) const { return matTvec(rot, v); }
  bool inside_local(const Vec& xl) const { return xl[ndim - 1] > graph->h(xl); }
};

// The chart at z0 of the surface {x_n = H(x')} with e_n the upward normal;
// h is evaluated by Newton in the normal direction plus implicit derivatives.
class ImplicitChartGraph : public GraphFn {
 public:
  ImplicitChartGraph(int ndim, GraphPtr global, const Vec& z0, const Mat& rot)
      : n_(ndim), H_(std::move(global)), z0_(z0), rot_(rot) {}
  int dim() const override { return n_ - 1; }
  double h(const Vec& y) const override;
  Vec grad(const Vec& y) const override;
  Mat hess(const Vec& y) const override;

 private:
  struct Local {
    double t;
    Vec p;
  };
  Local solve(const Vec& y) const;
  int n_;
  GraphPtr H_;
  Vec z0_;
  Mat rot_;
};

// Configurable constants that the estimates leave unspecified.
struct DomainConstants {
  double C_star = 1.0;       // smallness constant C*(n)
  double M0 = 1.0;           // oscillation constant
  double c0 = 0.05;          // localization radius cap c0(n, K)
  double c_half = 0.25;      // chart validity radius for deviation 1/2
  double C_n = 0.0;          // C(n) in the taper bounds; 0 means 4n
};

enum class DomainKind { torus, half_space, perturbed_half_space, ball, graph };

struct DomainSpec {
  DomainKind kind = DomainKind::torus;
  int ndim = 2;
  Vec center{0, 0, 0};       // ball
  double radius = 1.0;       // ball
  GraphPtr graph;            // perturbed half space and graph domain: {x_n > H(x')}
  double support_radius = 0.0;
  double alpha = kInf, beta = kInf, K = 0.0;
  Vec box_lo{0, 0, 0}, box_hi{1, 1, 1};
  double reach = kInf;       // known reach or a trusted lower estimate
  double band = kInf;        // width of the signed-distance validity band
  DomainConstants constants;

  bool has_boundary() const { return kind != DomainKind::torus; }
  double diameter() const;
  bool inside(const Vec& x) const;

  static DomainSpec torus(int ndim, double length = 1.0);
  static DomainSpec half_space(int ndim, const Vec& lo, const Vec& hi);
  static DomainSpec perturbed_half_space(int ndim, GraphPtr h, double R_h, const Vec& lo, const Vec& hi);
  static DomainSpec ball(int ndim, const Vec& center, double radius);
  // {x_n > H(x')} intersected with the box; alpha, beta, K describe the
  // uniform chart type and K also bounds the band width.
  static DomainSpec graph_domain(int ndim, GraphPtr H, double alpha, double beta, double K, const Vec& lo,
                                 const Vec& hi);
};

std::string kind_name(DomainKind k);

// Mask of nodes inside the domain (the whole grid for a torus).
Mask domain_mask(const DomainSpec& spec, const Grid& grid);

// Pointwise signed distance, positive inside, with the boundary foot point and
// unit gradient. valid is false when the point is outside the band.
struct DistanceSample {
  double d = 0.0;
  Vec grad{0, 0, 0};
  Vec foot{0, 0, 0};
  bool valid = false;
};
DistanceSample distance_at(const DomainSpec& spec, const Vec& x);

struct SignedDistanceField {
  ScalarField d;
  VectorField grad;
  Mask valid;
  double band = 0.0;
};
SignedDistanceField signed_distance(const DomainSpec& spec, const Grid& grid);

// Nearest boundary point; AmbiguityError outside the reach band.
Vec project_to_boundary(const DomainSpec& spec, const Vec& x);

// Nearest point of {x_n = g(y)} to x, in the graph's own coordinates, by a
// pre-scan over a window of the vertical distance and Newton refinement.
Vec graph_projection(const GraphFn& g, int ndim, const Vec& x);

// Boundary sample points with inward normals (deterministic).
struct BoundaryPoint {
  Vec x;
  Vec normal;
};
std::vector<BoundaryPoint> boundary_samples(const DomainSpec& spec, int per_axis);

struct ReachReport {
  double estimated = 0.0;     // bisection over the band width
  double cap = 0.0;           // largest width tested
  double rho0 = 0.0;          // min over charts of the largest rho with B_2rho(z0) in the chart box
  double curvature_bound = 0.0;  // min{1/(8nK), rho0}
  double beta_bound = 0.0;    // beta/4 when beta < 2/(nK), else 0
  bool beta_bound_applies = false;
  std::vector<double> chart_bounds;
  bool flagged = false;       // an analytic bound exceeds the estimate
};
ReachReport estimate_reach(const DomainSpec& spec, int density = 24);

// Chart of the domain at boundary point z0 (e_n the inward normal, h(0)=0,
// grad h(0)=0).
Chart chart_at(const DomainSpec& spec, const Vec& z0);

// Forward F0(eta) = (eta', h(eta')) + eta_n * nu(eta') in chart coordinates.
Vec normal_map_forward(const Chart& chart, const Vec& eta);
Mat normal_map_jacobian(const Chart& chart, const Vec& eta);
// Inverse by Newton to 1e-12, seeded by (pi x', d(x)) unless seed is given.
Vec normal_map_inverse(const Chart& chart, const Vec& x, const std::optional<Vec>& seed = std::nullopt);

struct ChartAudit {
  double forward_deviation = 0.0;  // max ||grad F0 - I||
  double inverse_deviation = 0.0;  // max ||grad F0^{-1} - I||
  bool below_eps = false;
  double forward_c2 = 0.0;
  double inverse_c2 = 0.0;
  double c2_cap = 0.0;             // 4n(1+K)^3
  int samples = 0;
};
ChartAudit check_chart_estimates(const Chart& chart, double rho, double eps, double K, int samples = 200,
                                 std::uint64_t seed = 7);

// Largest rho in (0, cap) with both chart deviations below eps (bisection).
double calibrate_chart_radius(const Chart& chart, double eps, double K, double cap);

struct StarAudit {
  Vec x0{0, 0, 0};
  int rays = 0;
  int single_crossings = 0;
  bool pass = false;
};
StarAudit check_star_like(const DomainSpec& spec, const Vec& z0, double rho, int rays, std::uint64_t seed = 11);

struct LipschitzAudit {
  double constant = 0.0;          // max over all sampled pairs
  double gamma_ratio = 0.0;       // pairs on the boundary graph part
  double sphere_ratio = 0.0;      // pairs on the sphere part
  double min_normal_component = 0.0;  // min of (e_n)^I_n over seam points
  int seam_points = 0;
  bool gamma_ok = false, sphere_ok = false, normal_ok = false;
};
LipschitzAudit sample_lipschitz_constant(const DomainSpec& spec, const Vec& z0, double rho, int samples,
                                         std::uint64_t seed = 13);

struct SmallnessAudit {
  double C_s = 0.0, C_1 = 0.0, C_star1 = 0.0, C_star2 = 0.0;
  double c1_norm = 0.0, hess_sup = 0.0;
  double first_lhs = 0.0, second_lhs = 0.0;
  bool first_ok = false, second_ok = false;
  bool pass() const { return first_ok && second_ok; }
};
SmallnessAudit check_smallness(const GraphFn& h, double R_h, double C_star);

// Sup norms of the derivatives of h over the closed ball of radius r.
struct GraphBounds {
  double sup_h = 0.0, sup_grad = 0.0, sup_hess = 0.0;
};
GraphBounds graph_bounds(const GraphFn& h, double r, int per_axis = 0);

struct LocalizedChart {
  DomainSpec half_space;   // perturbed half space in chart coordinates
  Chart chart;
  double lambda = 0.0;
  double reach_bound = 0.0;
  double theta_c1 = 0.0, theta_c2 = 0.0, theta_c3 = 0.0;
  double grad_sup = 0.0, grad_bound = 0.0;
  double hess_sup = 0.0, hess_bound = 0.0;
};
LocalizedChart localize_chart(const DomainSpec& spec, const Vec& z0, double rho);

// Sum over j <= k of sup |Theta^(j)| for the radial taper profile.
double theta_ck_norm(int k);

// K for a chart: max over orders <= 2 of the sampled sup of |D^s h| on B_alpha.
double chart_K(const Chart& chart, double alpha);

}  // namespace vbmo
