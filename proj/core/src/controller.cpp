#include "safenav/controller.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <sstream>

namespace safenav {

FilterConfig FilterConfig::minimum_intervention(
    std::function<Vec(double, const Vec&)> u_desired, double gamma,
    ExtendedClassK alpha, int m) {
  FilterConfig cfg;
  cfg.gamma = gamma;
  cfg.alpha = std::move(alpha);
  cfg.Q = [m](double, const Vec&) { return Mat::Identity(m, m); };
  cfg.c = [ud = std::move(u_desired)](double t, const Vec& x) -> Vec { return -ud(t, x); };
  return cfg;
}

double constraint_value(const PsiChainResult& chain, const Vec& u_hat, double mu_hat,
                        const ExtendedClassK& alpha) {
  if (u_hat.size() != chain.Lg_psi1.size())
    throw std::invalid_argument("constraint_value: input dimension mismatch");
  return chain.dpsi1_dt + chain.Lf_psi1 + chain.Lg_psi1.dot(u_hat) + alpha(chain.psi1) +
         mu_hat * chain.psi1;
}

namespace {

struct CostData {
  Mat Q;
  Eigen::LLT<Mat> llt;
  Vec c;
  Vec u_free;    // -Q^-1 c
  Vec Qinv_a;    // Q^-1 Lg^T
  double omega;
  double d;
  double base;   // dpsi1/dt + Lf psi1 + alpha(psi1)
};

CostData prepare(double t, const Vec& x, const PsiChainResult& chain,
                 const FilterConfig& cfg) {
  CostData cd;
  if (!(cfg.gamma > 0.0)) throw ConfigError("filter: gamma must be > 0");
  cd.Q = cfg.Q(t, x);
  if (cd.Q.rows() != cd.Q.cols() || cd.Q.rows() != chain.Lg_psi1.size())
    throw ConfigError("filter: Q dimension mismatch");
  cd.llt.compute(cd.Q);
  if (cd.llt.info() != Eigen::Success) throw ConfigError("filter: Q is not positive definite");
  cd.c = cfg.c(t, x);
  cd.u_free = cd.llt.solve(-cd.c);
  cd.Qinv_a = cd.llt.solve(chain.Lg_psi1);
  cd.base = chain.dpsi1_dt + chain.Lf_psi1 + cfg.alpha(chain.psi1);
  cd.omega = cd.base + chain.Lg_psi1.dot(cd.u_free);
  cd.d = chain.Lg_psi1.dot(cd.Qinv_a) + chain.psi1 * chain.psi1 / cfg.gamma;
  return cd;
}

}  // namespace

ControlOutput compute_control(double t, const Vec& x, const PsiChainResult& chain,
                              const FilterConfig& cfg) {
  const CostData cd = prepare(t, x, chain, cfg);

  ControlOutput out;
  out.psi0 = chain.psi0;
  out.psi1 = chain.psi1;
  out.omega = cd.omega;
  out.d = cd.d;
  out.assumption_warning = chain.lg_degenerate;

  if (cd.omega >= 0.0) {
    out.lambda = 0.0;
    out.u_star = cd.u_free;
    out.mu_star = 0.0;
  } else {
    double d_eff = cd.d;
    if (d_eff < 1e-12) {
      if (cfg.verification_mode) {
        std::ostringstream msg;
        msg << "filter: constraint direction vanished (omega=" << cd.omega
            << ", d=" << cd.d << ", psi1=" << chain.psi1 << ")";
        throw AssumptionViolation(msg.str());
      }
      d_eff = 1e-12;
      out.assumption_warning = true;
    }
    out.lambda = -cd.omega / d_eff;
    out.u_star = cd.u_free + out.lambda * cd.Qinv_a;
    out.mu_star = chain.psi1 * out.lambda / cfg.gamma;
  }

  out.constraint_value = constraint_value(chain, out.u_star, out.mu_star, cfg.alpha);
  out.slack_active = out.lambda > 0.0 && chain.psi1 != 0.0;
  return out;
}

QpOracleResult qp_oracle(double t, const Vec& x, const PsiChainResult& chain,
                         const FilterConfig& cfg) {
  const CostData cd = prepare(t, x, chain, cfg);
  const Eigen::Index m = cd.c.size();

  QpOracleResult res;
  if (cd.omega >= 0.0) {
    res.u = cd.u_free;
    res.mu = 0.0;
    return res;
  }

  // Active constraint: solve the equality-constrained KKT system in
  // variables (u, mu, lambda).
  Mat kkt = Mat::Zero(m + 2, m + 2);
  kkt.topLeftCorner(m, m) = cd.Q;
  kkt(m, m) = cfg.gamma;
  Vec a(m + 1);
  a.head(m) = chain.Lg_psi1;
  a(m) = chain.psi1;
  kkt.block(0, m + 1, m + 1, 1) = -a;
  kkt.block(m + 1, 0, 1, m + 1) = a.transpose();

  Vec rhs = Vec::Zero(m + 2);
  rhs.head(m) = -cd.c;
  rhs(m + 1) = -cd.base;

  Eigen::FullPivLU<Mat> lu(kkt);
  if (!lu.isInvertible()) throw AssumptionViolation("qp_oracle: singular KKT system");
  Vec sol = lu.solve(rhs);

  Vec v(m + 1);
  v = sol.head(m + 1);

  // Projected-gradient polish on {b >= 0}; keeps the best feasible iterate.
  const auto cost = [&](const Vec& w) {
    const Vec u = w.head(m);
    return 0.5 * u.dot(cd.Q * u) + cd.c.dot(u) + 0.5 * cfg.gamma * w(m) * w(m);
  };
  const auto project = [&](Vec& w) {
    const double b = a.dot(w) + cd.base;
    if (b < 0.0) w -= (b / a.squaredNorm()) * a;
  };
  project(v);
  Vec best = v;
  double best_cost = cost(v);
  const double step = 1.0 / (cd.Q.norm() + cfg.gamma);
  for (int it = 0; it < 64; ++it) {
    Vec grad(m + 1);
    grad.head(m) = cd.Q * v.head(m) + cd.c;
    grad(m) = cfg.gamma * v(m);
    v -= step * grad;
    project(v);
    const double c_now = cost(v);
    if (c_now < best_cost) {
      best_cost = c_now;
      best = v;
    }
  }

  res.u = best.head(m);
  res.mu = best(m);
  return res;
}

}  // namespace safenav
