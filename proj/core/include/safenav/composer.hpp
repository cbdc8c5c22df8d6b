#pragma once

#include <functional>
#include <vector>

#include "safenav/barrier.hpp"
#include "safenav/errors.hpp"
#include "safenav/softblend.hpp"
#include "safenav/systems.hpp"

namespace safenav {

/// Extended class-K function with derivative. The shipped scenarios all use
/// linear gains; arbitrary monotone maps fit behind the same interface.
struct ExtendedClassK {
  std::function<double(double)> f;
  std::function<double(double)> df;

  double operator()(double s) const { return f(s); }
  double deriv(double s) const { return df(s); }

  static ExtendedClassK linear(double gain) {
    return ExtendedClassK{[gain](double s) { return gain * s; },
                          [gain](double) { return gain; }};
  }
};

/// How the window of snapshots is composed into psi0:
///  - InnerBlend: one soft max whose last argument crossfades the newest
///    snapshot in and the oldest out.
///  - OuterBlend: crossfade between the soft max of the previous window and
///    the soft max of the current window. Equivalent to InnerBlend when N=1.
enum class CompositionVariant { InnerBlend, OuterBlend };

struct ComposerConfig {
  int window_n = 1;  // N >= 1; the window holds N+1 snapshots
  double period = 0.2;
  double kappa = 30.0;
  SmoothstepSpec eta;
  CompositionVariant variant = CompositionVariant::InnerBlend;
  ExtendedClassK alpha0 = ExtendedClassK::linear(1.0);
  int r = 2;
};

/// Everything the safety filter needs about psi1 at one (t, x), plus the
/// psi0 jet data used for logging and verification.
struct PsiChainResult {
  double psi0 = 0.0;
  double psi1 = 0.0;
  double dpsi0_dt = 0.0;
  double dpsi0_dtt = 0.0;
  double dpsi1_dt = 0.0;
  Vec grad_psi0;
  Vec dt_grad_psi0;
  Vec grad_psi1;
  double Lf_psi1 = 0.0;
  Vec Lg_psi1;
  std::vector<double> mu;   // per-slot convex weights, mu[j] for b_{k-j}
  bool lg_degenerate = false;  // ||Lg psi1|| < 1e-9 while psi1 <= 0
  // For a single-slot window only: the origin sits on the segment between the
  // two snapshots' input-side derivatives, so the blend could lose its input
  // authority somewhere in the epoch. Sufficient-condition monitor, not a
  // hard error.
  bool hull_condition_violated = false;
};

/// Chain step psi1 = dpsi0/dt + Lf psi0 + alpha0(psi0) with full first-order
/// data of psi1, evaluated from any psi0 jet. Only relative degree 2 is
/// supported.
PsiChainResult build_psi_chain(const ScalarJet2& psi0, const Vec& x,
                               const SystemModel& model, const ExtendedClassK& alpha0);

/// Sliding window of the N+1 most recent perception barriers with the
/// smoothstep homotopy. Mutates only through push_perception; evaluation
/// between pushes is reentrant.
class CompositeBarrier {
 public:
  explicit CompositeBarrier(ComposerConfig cfg);

  const ComposerConfig& config() const { return cfg_; }
  bool initialized() const { return k_ >= 0; }
  int current_k() const { return k_; }
  const PerceptionBarrier& slot(int j) const { return window_.at(j); }  // b_{k-j}

  /// Install the snapshot captured at sample k. The first push must use
  /// k = 0 and bootstraps every slot with that snapshot; subsequent pushes
  /// must arrive in order.
  void push_perception(PerceptionBarrier b, int k);

  /// psi0 jet in the state space of x, with the per-slot convex weights.
  /// Valid for t inside the current epoch [kT, (k+1)T).
  ScalarJet2 eval_psi0_jet(double t, const Vec& x, std::vector<double>* mu = nullptr) const;

  /// Value-only fast path (used by high-rate logging).
  double eval_psi0_value(double t, const Vec& x) const;

  PsiChainResult eval_psi_chain(double t, const Vec& x, const SystemModel& model) const;

 private:
  double homotopy_phase(double t) const;  // s = t/T - k, with epoch check

  ComposerConfig cfg_;
  std::vector<PerceptionBarrier> window_;  // window_[j] = b_{k-j}
  int k_ = -1;
};

}  // namespace safenav
