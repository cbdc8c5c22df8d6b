#pragma once

#include <functional>

#include "safenav/composer.hpp"

namespace safenav {

/// Cost and constraint shaping for the safety filter. Q must be symmetric
/// positive definite at every query.
struct FilterConfig {
  double gamma = 200.0;  // slack weight
  ExtendedClassK alpha = ExtendedClassK::linear(1.0);
  std::function<Mat(double, const Vec&)> Q;
  std::function<Vec(double, const Vec&)> c;
  // Verification mode turns a vanishing constraint direction (d ~ 0 with the
  // constraint active) into a hard error; simulation mode clamps the
  // multiplier and raises a warning flag instead.
  bool verification_mode = false;

  static FilterConfig minimum_intervention(
      std::function<Vec(double, const Vec&)> u_desired, double gamma,
      ExtendedClassK alpha, int m);
};

struct ControlOutput {
  Vec u_star;
  double mu_star = 0.0;
  double lambda = 0.0;
  double omega = 0.0;
  double d = 0.0;
  double psi0 = 0.0;
  double psi1 = 0.0;
  double constraint_value = 0.0;
  bool slack_active = false;
  bool assumption_warning = false;
};

/// Safety constraint function b(t,x,u,mu) evaluated at a candidate pair.
double constraint_value(const PsiChainResult& chain, const Vec& u_hat, double mu_hat,
                        const ExtendedClassK& alpha);

/// Closed-form minimizer of the filtered cost subject to the safety
/// constraint. The multiplier divides by d only when the constraint is
/// active (omega < 0); d > 0 is guaranteed there as long as the
/// nonvanishing-direction assumption holds.
ControlOutput compute_control(double t, const Vec& x, const PsiChainResult& chain,
                              const FilterConfig& cfg);

/// Numerical cross-check of the closed form: unconstrained minimizer when
/// the constraint is inactive, otherwise a dense KKT solve polished by
/// projected gradient steps.
struct QpOracleResult {
  Vec u;
  double mu = 0.0;
};
QpOracleResult qp_oracle(double t, const Vec& x, const PsiChainResult& chain,
                         const FilterConfig& cfg);

}  // namespace safenav
