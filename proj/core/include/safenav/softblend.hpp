#pragma once

#include <span>
#include <vector>

#include "safenav/jet.hpp"

namespace safenav {

// ---------------------------------------------------------------------------
// Log-sum-exp soft minimum / soft maximum
//
//   softmin_k(z) = -(1/k) log sum_i exp(-k z_i)
//   softmax_k(z) =  (1/k) log sum_i exp( k z_i) - log(N)/k
//
// Both are evaluated in shifted form (pull out the hard min/max first) so no
// exponential ever sees a positive argument; safe for |z| up to 1e6 and
// k up to 1e3 and beyond.
// ---------------------------------------------------------------------------

double stable_softmin(std::span<const double> z, double kappa);
double stable_softmax(std::span<const double> z, double kappa);

enum class BlendMode { Min, Max };

/// Convex weights of the soft blend: w_j >= 0, sum w_j = 1, computed from the
/// shifted exponentials. For Min the weights concentrate on the smallest
/// arguments, for Max on the largest.
void softblend_weights(std::span<const double> z, double kappa, BlendMode mode,
                       std::vector<double>& w);

/// Propagate second-order jets through the soft blend. The value equals
/// stable_softmin/stable_softmax of the argument values, first derivatives are
/// the w-weighted averages, and second derivatives pick up the kappa-scaled
/// covariance of the first derivatives (positive sign for Max, negative for
/// Min). If `weights` is non-null it receives the convex weights.
ScalarJet2 softblend_jet(std::span<const ScalarJet2> args, double kappa,
                         BlendMode mode, std::vector<double>* weights = nullptr);

// ---------------------------------------------------------------------------
// Smoothstep homotopy
//
// eta : R -> [0,1] with eta = 0 on (-inf,0], eta = 1 on [1/nu,inf), and the
// first r derivatives vanishing at both ends. The polynomial kind is
//
//   eta(t) = s^{r+1} sum_{j=0..r} C(r+j,j) C(2r+1,r-j) (-s)^j,   s = nu t,
//
// and the sinusoidal kind (valid for r in {1,2}) is nu t - sin(2 pi nu t)/(2 pi).
// ---------------------------------------------------------------------------

struct SmoothstepSpec {
  enum class Kind { Polynomial, Sinusoidal };
  Kind kind = Kind::Polynomial;
  int r = 2;        // smoothness order, 1..8 for Polynomial, 1..2 for Sinusoidal
  double nu = 1.0;  // transition rate, >= 1

  void validate() const;
};

struct Smoothstep3 {
  double value = 0.0;
  double d1 = 0.0;  // d/dt
  double d2 = 0.0;  // d^2/dt^2
};

Smoothstep3 smoothstep_jet(double t, const SmoothstepSpec& spec);

}  // namespace safenav
