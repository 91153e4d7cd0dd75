// Interior and boundary-fitted cut-off functions built from the bump profiles.
#pragma once

#include "vbmo/domains.hpp"
#include "vbmo/profiles.hpp"

namespace vbmo {

struct CutoffValue {
  double v = 0.0;
  Vec grad{0, 0, 0};
  Mat hess{};
};

// phi(|y - x| / eps): 1 on B_eps(x), 0 outside B_{3 eps / 2}(x).
class InteriorCutoff {
 public:
  InteriorCutoff(int ndim, const Vec& x, double eps);
  double value(const Vec& y) const;
  CutoffValue eval(const Vec& y) const;
  const Vec& center() const { return x_; }
  double eps() const { return eps_; }
  int ndim() const { return n_; }

 private:
  int n_;
  Vec x_;
  double eps_;
};

// (psi(|eta_n| / eps) psi(|eta'| / eps)) o F0^{-1} in the chart at z0: 1 on
// U_{3 eps}(z0), supported in the closure of U_{4 eps}(z0).
class BoundaryCutoff {
 public:
  BoundaryCutoff(const Chart& chart, double eps);
  double value(const Vec& x) const;
  // Gradient through the inverse Jacobian of F0; Hessian by central
  // differences of the gradient with step 1e-5 eps.
  CutoffValue eval(const Vec& x, bool with_hessian = true) const;
  // Normal coordinates of a global point (OutsideChartError when far).
  Vec coordinates(const Vec& x) const;
  const Chart& chart() const { return chart_; }
  double eps() const { return eps_; }

 private:
  CutoffValue eval_local(const Vec& xl, bool with_hessian) const;
  Vec grad_local(const Vec& xl) const;
  bool far(const Vec& xl) const;
  Chart chart_;
  double eps_;
};

// Sampled cut-off values on a grid.
ScalarField sample_cutoff(const InteriorCutoff& c, const Grid& g);
ScalarField sample_cutoff(const BoundaryCutoff& c, const Grid& g);

struct CutoffAudit {
  double min_value = 0.0, max_value = 0.0;
  bool plateau_ok = false, support_ok = false;
  double eps2_hessian = 0.0;     // eps^2 * max ||Hessian||
  double max_normal_derivative = 0.0;  // boundary family: max |grad d . grad phi| in the 3 eps band
  int samples = 0;
};

// Dense scaled sampling: points x + eps * (fixed pattern), so the eps^2
// scaling of the Hessian is compared on identical relative positions.
CutoffAudit audit_interior_cutoff(const InteriorCutoff& c, int samples, std::uint64_t seed = 3);
CutoffAudit audit_boundary_cutoff(const BoundaryCutoff& c, const DomainSpec& spec, int samples,
                                  std::uint64_t seed = 5);

// Measure of {phi = 1} for the interior cutoff on a grid (count times cell volume).
double interior_plateau_measure(const InteriorCutoff& c, const Grid& g);

}  // namespace vbmo
