#include "safenav/composer.hpp"

#include <cmath>
#include <sstream>

namespace safenav {

namespace {

// Affine crossfade c(t) = eta*a + (1-eta)*b of two jets with a time-varying
// coefficient; eta carries its own time derivatives.
ScalarJet2 crossfade(const ScalarJet2& a, const ScalarJet2& b, const Smoothstep3& eta,
                     double inv_T) {
  const double e = eta.value;
  const double de = eta.d1 * inv_T;    // d/dt of eta(t/T - k)
  const double dde = eta.d2 * inv_T * inv_T;

  ScalarJet2 out(a.dim());
  out.value = e * a.value + (1.0 - e) * b.value;
  out.dt = de * (a.value - b.value) + e * a.dt + (1.0 - e) * b.dt;
  out.dtt = dde * (a.value - b.value) + 2.0 * de * (a.dt - b.dt) + e * a.dtt + (1.0 - e) * b.dtt;
  out.grad = e * a.grad + (1.0 - e) * b.grad;
  out.dt_grad = de * (a.grad - b.grad) + e * a.dt_grad + (1.0 - e) * b.dt_grad;
  out.hess = e * a.hess + (1.0 - e) * b.hess;
  return out;
}

}  // namespace

CompositeBarrier::CompositeBarrier(ComposerConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.window_n < 1) throw std::invalid_argument("composer: window N must be >= 1");
  if (!(cfg_.period > 0.0)) throw std::invalid_argument("composer: period must be > 0");
  if (!(cfg_.kappa > 0.0)) throw std::invalid_argument("composer: kappa must be > 0");
  cfg_.eta.validate();
}

void CompositeBarrier::push_perception(PerceptionBarrier b, int k) {
  if (k_ < 0) {
    if (k != 0) throw SequencingError("composer: first push must carry k = 0");
    window_.assign(static_cast<size_t>(cfg_.window_n) + 1, b);
    k_ = 0;
    return;
  }
  if (k != k_ + 1) {
    std::ostringstream msg;
    msg << "composer: push k=" << k << " after k=" << k_;
    throw SequencingError(msg.str());
  }
  window_.pop_back();
  window_.insert(window_.begin(), std::move(b));
  k_ = k;
}

double CompositeBarrier::homotopy_phase(double t) const {
  if (k_ < 0) throw SequencingError("composer: no perception pushed yet");
  if (t < 0.0) throw SequencingError("composer: negative time");
  // Half-ULP style guard: a query landing a hair before kT belongs to the
  // new epoch that the matching push just opened.
  const double s_abs = t / cfg_.period;
  const int k = static_cast<int>(std::floor(s_abs + 1e-9));
  if (k != k_) {
    std::ostringstream msg;
    msg << "composer: t=" << t << " outside epoch k=" << k_;
    throw SequencingError(msg.str());
  }
  return std::min(std::max(s_abs - static_cast<double>(k), 0.0), 1.0);
}

ScalarJet2 CompositeBarrier::eval_psi0_jet(double t, const Vec& x,
                                           std::vector<double>* mu) const {
  const double s = homotopy_phase(t);
  const Smoothstep3 eta = smoothstep_jet(s, cfg_.eta);
  const double inv_T = 1.0 / cfg_.period;
  const int N = cfg_.window_n;
  const Eigen::Index dim = window_[0].dim;
  if (x.size() < dim) throw std::invalid_argument("composer: state dimension mismatch");
  const Vec pos = x.head(dim);

  std::vector<ScalarJet2> slot_jets(static_cast<size_t>(N) + 1);
  for (int j = 0; j <= N; ++j) slot_jets[j] = window_[j].position_jet(pos);

  ScalarJet2 psi0(dim);
  std::vector<double> weights;
  if (mu) mu->assign(static_cast<size_t>(N) + 1, 0.0);

  if (cfg_.variant == CompositionVariant::InnerBlend) {
    const ScalarJet2 blend = crossfade(slot_jets[0], slot_jets[N], eta, inv_T);
    if (N == 1) {
      psi0 = blend;  // soft max of a single argument is the identity
      if (mu) {
        (*mu)[0] = eta.value;
        (*mu)[1] = 1.0 - eta.value;
      }
    } else {
      std::vector<ScalarJet2> args;
      args.reserve(static_cast<size_t>(N));
      for (int j = 1; j <= N - 1; ++j) args.push_back(slot_jets[j]);
      args.push_back(blend);
      psi0 = softblend_jet(args, cfg_.kappa, BlendMode::Max, mu ? &weights : nullptr);
      if (mu) {
        for (int j = 1; j <= N - 1; ++j) (*mu)[j] = weights[j - 1];
        (*mu)[0] = eta.value * weights[static_cast<size_t>(N) - 1];
        (*mu)[N] = (1.0 - eta.value) * weights[static_cast<size_t>(N) - 1];
      }
    }
  } else {
    // crossfade of the previous-window soft max and the current-window soft max
    if (N == 1) {
      psi0 = crossfade(slot_jets[0], slot_jets[1], eta, inv_T);
      if (mu) {
        (*mu)[0] = eta.value;
        (*mu)[1] = 1.0 - eta.value;
      }
    } else {
      std::vector<ScalarJet2> newer(slot_jets.begin(), slot_jets.end() - 1);
      std::vector<ScalarJet2> older(slot_jets.begin() + 1, slot_jets.end());
      std::vector<double> w_new, w_old;
      const ScalarJet2 sm_new =
          softblend_jet(newer, cfg_.kappa, BlendMode::Max, mu ? &w_new : nullptr);
      const ScalarJet2 sm_old =
          softblend_jet(older, cfg_.kappa, BlendMode::Max, mu ? &w_old : nullptr);
      psi0 = crossfade(sm_new, sm_old, eta, inv_T);
      if (mu) {
        for (int j = 0; j <= N - 1; ++j) (*mu)[j] += eta.value * w_new[j];
        for (int j = 1; j <= N; ++j) (*mu)[j] += (1.0 - eta.value) * w_old[j - 1];
      }
    }
  }

  return psi0.lifted(x.size());
}

double CompositeBarrier::eval_psi0_value(double t, const Vec& x) const {
  const double s = homotopy_phase(t);
  const double e = smoothstep_jet(s, cfg_.eta).value;
  const int N = cfg_.window_n;
  const Eigen::Index dim = window_[0].dim;
  const Vec pos = x.head(dim);

  std::vector<double> vals(static_cast<size_t>(N) + 1);
  for (int j = 0; j <= N; ++j) vals[j] = window_[j].value(pos);

  if (cfg_.variant == CompositionVariant::InnerBlend) {
    if (N == 1) return e * vals[0] + (1.0 - e) * vals[1];
    std::vector<double> args(vals.begin() + 1, vals.end() - 1);
    args.push_back(e * vals[0] + (1.0 - e) * vals[static_cast<size_t>(N)]);
    return stable_softmax(args, cfg_.kappa);
  }
  if (N == 1) return e * vals[0] + (1.0 - e) * vals[1];
  const std::span<const double> all(vals);
  const double sm_new = stable_softmax(all.first(static_cast<size_t>(N)), cfg_.kappa);
  const double sm_old = stable_softmax(all.last(static_cast<size_t>(N)), cfg_.kappa);
  return e * sm_new + (1.0 - e) * sm_old;
}

PsiChainResult build_psi_chain(const ScalarJet2& psi0, const Vec& x,
                               const SystemModel& model, const ExtendedClassK& alpha0) {
  if (model.r != 2) throw ConfigError("psi chain: only relative degree 2 is supported");
  if (psi0.dim() != model.n || x.size() != model.n)
    throw std::invalid_argument("psi chain: state dimension mismatch");

  const Vec f = model.f(x);
  const Mat g = model.g(x);
  const Mat jf = model.jac_f(x);

  PsiChainResult out;
  out.psi0 = psi0.value;
  out.dpsi0_dt = psi0.dt;
  out.dpsi0_dtt = psi0.dtt;
  out.grad_psi0 = psi0.grad;
  out.dt_grad_psi0 = psi0.dt_grad;

  const double a0 = alpha0(psi0.value);
  const double da0 = alpha0.deriv(psi0.value);

  out.psi1 = psi0.dt + psi0.grad.dot(f) + a0;
  out.dpsi1_dt = psi0.dtt + psi0.dt_grad.dot(f) + da0 * psi0.dt;
  out.grad_psi1 = psi0.dt_grad + psi0.hess * f + jf.transpose() * psi0.grad + da0 * psi0.grad;
  out.Lf_psi1 = out.grad_psi1.dot(f);
  out.Lg_psi1 = g.transpose() * out.grad_psi1;
  out.lg_degenerate = out.Lg_psi1.norm() < 1e-9 && out.psi1 <= 0.0;
  return out;
}

PsiChainResult CompositeBarrier::eval_psi_chain(double t, const Vec& x,
                                                const SystemModel& model) const {
  std::vector<double> mu;
  const ScalarJet2 psi0 = eval_psi0_jet(t, x, &mu);
  PsiChainResult out = build_psi_chain(psi0, x, model, cfg_.alpha0);
  out.mu = std::move(mu);

  if (cfg_.window_n == 1) {
    // Sufficient condition for the blend to keep input authority: the origin
    // off the segment between the two snapshots' input-side derivatives.
    const Vec f = model.f(x);
    const Mat g = model.g(x);
    const Mat jft = model.jac_f(x).transpose();
    const auto lglf = [&](const PerceptionBarrier& b) -> Vec {
      const ScalarJet2 j = eval_barrier_jet(b, x);
      return g.transpose() * (j.hess * f + jft * j.grad);
    };
    const Vec a0 = lglf(window_[0]);
    const Vec a1 = lglf(window_[1]);
    const Vec d = a1 - a0;
    const double len2 = d.squaredNorm();
    const double s = len2 > 0.0 ? std::clamp(-a0.dot(d) / len2, 0.0, 1.0) : 0.0;
    const double dist = (a0 + s * d).norm();
    const double scale = std::max({a0.norm(), a1.norm(), 1e-6});
    out.hull_condition_violated = dist < 1e-9 * scale;
  }
  return out;
}

}  // namespace safenav
