#include "safenav/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "safenav/controller.hpp"
#include "safenav/rng.hpp"
#include "safenav/scenario_io.hpp"
#include "safenav/sim.hpp"

namespace safenav {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

struct Checker {
  SuiteReport report;

  void add(const std::string& name, bool pass, const std::string& detail) {
    report.checks.push_back({name, pass, detail});
  }
  /// worst-case style check: pass iff worst <= limit
  void bound(const std::string& name, double worst, double limit) {
    add(name, worst <= limit, "worst " + fmt(worst) + " vs limit " + fmt(limit));
  }
};

// --- finite differences ----------------------------------------------------

double rel_err(const Vec& a, const Vec& b) {
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}
double rel_err(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}
double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Richardson-extrapolated central difference at base step h: fourth-order in
// the step, so sharp composite fields stay below the tolerance without
// shrinking h into the roundoff floor.
template <typename F>
auto central_diff_rich(const F& eval, double h) {
  using R = std::decay_t<decltype(eval(h))>;
  const R d_h = (eval(h) - eval(-h)) * (1.0 / (2.0 * h));
  const R d_h2 = (eval(0.5 * h) - eval(-0.5 * h)) * (1.0 / h);
  return R((4.0 * d_h2 - d_h) * (1.0 / 3.0));
}

template <typename F>
Vec fd_gradient_rich(const F& f, const Vec& x, double h) {
  Vec g(x.size());
  Vec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    g(i) = central_diff_rich(
        [&](double d) {
          xp(i) = x(i) + d;
          const double v = f(xp);
          xp(i) = x(i);
          return v;
        },
        h);
  }
  return g;
}

// Full first/second-derivative cross-check of a jet field J(t,x). The value
// validates the gradient and time derivative by central differences; the
// already-validated first derivatives then validate the second derivatives
// at the same step (second differences of the raw value would sit above the
// roundoff floor at this step size).
template <typename JetFn>
double jet_fd_error(const JetFn& jets, double t, const Vec& x, double h) {
  const ScalarJet2 j0 = jets(t, x);
  const Eigen::Index n = x.size();
  double worst = 0.0;

  Vec grad_fd(n);
  Mat hess_fd(n, n);
  Vec xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto value_at = [&](double d) {
      xp(i) = x(i) + d;
      const double v = jets(t, xp).value;
      xp(i) = x(i);
      return v;
    };
    const auto grad_at = [&](double d) -> Vec {
      xp(i) = x(i) + d;
      Vec g = jets(t, xp).grad;
      xp(i) = x(i);
      return g;
    };
    grad_fd(i) = central_diff_rich(value_at, h);
    hess_fd.col(i) = central_diff_rich(grad_at, h);
  }
  const double dt_fd = central_diff_rich([&](double d) { return jets(t + d, x).value; }, h);
  const double dtt_fd = central_diff_rich([&](double d) { return jets(t + d, x).dt; }, h);
  const Vec dt_grad_fd =
      central_diff_rich([&](double d) -> Vec { return jets(t + d, x).grad; }, h);

  worst = std::max(worst, rel_err(grad_fd, j0.grad));
  worst = std::max(worst, rel_err(Mat(0.5 * (hess_fd + hess_fd.transpose())), j0.hess));
  worst = std::max(worst, rel_err(dt_fd, j0.dt));
  worst = std::max(worst, rel_err(dtt_fd, j0.dtt));
  worst = std::max(worst, rel_err(dt_grad_fd, j0.dt_grad));
  worst = std::max(worst, (j0.hess - j0.hess.transpose()).norm());
  return worst;
}

// --- random problem builders ------------------------------------------------

Scan random_scan_2d(SplitMix64& rng, int n_points) {
  Scan scan;
  scan.dim = 2;
  scan.pose = Vec(2);
  scan.pose << 8.0, 8.0;
  for (int i = 0; i < n_points; ++i) {
    ScanPoint pt;
    pt.range = rng.uniform(0.8, 4.8);
    pt.azimuth = rng.uniform(0.0, 2.0 * M_PI);
    scan.points.push_back(pt);
  }
  return scan;
}

Scan random_scan_3d(SplitMix64& rng, int n_points) {
  Scan scan;
  scan.dim = 3;
  scan.pose = Vec(3);
  scan.pose << 0.0, 0.0, 5.0;
  for (int i = 0; i < n_points; ++i) {
    ScanPoint pt;
    pt.range = rng.uniform(0.8, 4.8);
    pt.azimuth = rng.uniform(0.0, 2.0 * M_PI);
    pt.elevation = rng.uniform(-0.5 * M_PI, 0.5 * M_PI);
    scan.points.push_back(pt);
  }
  return scan;
}

Vec random_state_near(SplitMix64& rng, const Vec& pose, int state_dim, double radius) {
  Vec x = Vec::Zero(state_dim);
  for (Eigen::Index i = 0; i < pose.size(); ++i) x(i) = pose(i) + rng.uniform(-radius, radius);
  for (Eigen::Index i = pose.size(); i < state_dim; ++i) x(i) = rng.uniform(-2.0, 2.0);
  return x;
}

/// Composer fed with a short history of snapshots taken along a moving pose.
CompositeBarrier make_history_composer(SplitMix64& rng, int N, int dim, int pushes,
                                       CompositionVariant variant, double alpha0_gain) {
  ComposerConfig cc;
  cc.window_n = N;
  cc.period = 0.2;
  cc.kappa = 30.0;
  cc.eta.kind = SmoothstepSpec::Kind::Polynomial;
  cc.eta.r = 2;
  cc.eta.nu = 2.0;
  cc.variant = variant;
  cc.alpha0 = ExtendedClassK::linear(alpha0_gain);
  CompositeBarrier cb(cc);

  BarrierConfig bc;
  bc.max_range = 5.0;
  bc.rho = 25.0;
  for (int k = 0; k < pushes; ++k) {
    Scan scan = (dim == 2) ? random_scan_2d(rng, 12) : random_scan_3d(rng, 12);
    scan.index_k = k;
    scan.pose(0) += 0.25 * k;  // pose drifts between snapshots
    cb.push_perception(synthesize_barrier(scan, bc), k);
  }
  return cb;
}

PsiChainResult random_chain(SplitMix64& rng, int m, int n) {
  PsiChainResult ch;
  ch.psi0 = rng.uniform(-2.0, 4.0);
  ch.psi1 = rng.uniform(-3.0, 3.0);
  ch.dpsi0_dt = rng.normal();
  ch.dpsi1_dt = 5.0 * rng.normal();
  ch.Lf_psi1 = 5.0 * rng.normal();
  ch.grad_psi0 = Vec::Zero(n);
  ch.grad_psi1 = Vec::Zero(n);
  ch.dt_grad_psi0 = Vec::Zero(n);
  ch.Lg_psi1 = Vec(m);
  for (int i = 0; i < m; ++i) ch.Lg_psi1(i) = 3.0 * rng.normal();
  return ch;
}

FilterConfig random_filter(SplitMix64& rng, int m, double gamma) {
  Mat A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = rng.normal();
  const Mat Q = A.transpose() * A + 0.5 * Mat::Identity(m, m);
  Vec c(m);
  for (int i = 0; i < m; ++i) c(i) = 2.0 * rng.normal();
  FilterConfig cfg;
  cfg.gamma = gamma;
  cfg.alpha = ExtendedClassK::linear(rng.uniform(10.0, 60.0));
  cfg.Q = [Q](double, const Vec&) { return Q; };
  cfg.c = [c](double, const Vec&) { return c; };
  cfg.verification_mode = true;
  return cfg;
}

}  // namespace

// ===========================================================================
// softmath
// ===========================================================================

SuiteReport verify_softmath(std::uint64_t seed) {
  Checker ck;
  ck.report.suite = "softmath";
  SplitMix64 rng(seed ^ 0x50f7);

  // Bounds relative to the hard min/max, all kappas, wide magnitudes.
  double worst_slack = 0.0;
  bool finite = true;
  const double kappas[] = {1.0, 10.0, 100.0, 1000.0};
  for (int it = 0; it < 10000; ++it) {
    const int n = 1 + static_cast<int>(rng.next() % 10);
    std::vector<double> z(n);
    const double scale = (it % 3 == 0) ? 1e6 : 10.0;
    for (auto& v : z) v = rng.uniform(-scale, scale);
    const double zmin = *std::min_element(z.begin(), z.end());
    const double zmax = *std::max_element(z.begin(), z.end());
    const double kappa = kappas[it % 4];
    const double logn = std::log(static_cast<double>(n));
    const double smin = stable_softmin(z, kappa);
    const double smax = stable_softmax(z, kappa);
    finite = finite && std::isfinite(smin) && std::isfinite(smax);
    worst_slack = std::max(worst_slack, smin - zmin);                  // smin <= zmin
    worst_slack = std::max(worst_slack, (zmin - logn / kappa) - smin); // lower bound
    worst_slack = std::max(worst_slack, smax - zmax);
    worst_slack = std::max(worst_slack, (zmax - logn / kappa) - smax);
  }
  ck.add("soft bounds finite at |z|<=1e6", finite, "no overflow in shifted form");
  ck.bound("soft min/max bracket the hard min/max", worst_slack, 1e-12);

  // Monotone convergence on a doubling ladder.
  bool monotone = true;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> z(5);
    for (auto& v : z) v = rng.uniform(-5.0, 5.0);
    const double zmin = *std::min_element(z.begin(), z.end());
    const double zmax = *std::max_element(z.begin(), z.end());
    double prev_min = 1e300, prev_max = 1e300;
    for (double kappa = 1.0; kappa <= 1024.0; kappa *= 2.0) {
      const double gap_min = std::abs(stable_softmin(z, kappa) - zmin);
      const double gap_max = std::abs(stable_softmax(z, kappa) - zmax);
      monotone = monotone && gap_min <= prev_min + 1e-15 && gap_max <= prev_max + 1e-15;
      prev_min = gap_min;
      prev_max = gap_max;
    }
  }
  ck.add("approximation gap nonincreasing in kappa", monotone, "kappa ladder 1..1024");

  // Shifted form agrees with the naive form wherever the naive form is safe.
  double worst_shift = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const int n = 2 + static_cast<int>(rng.next() % 6);
    std::vector<double> z(n);
    for (auto& v : z) v = rng.uniform(-3.0, 3.0);
    const double kappa = rng.uniform(0.5, 80.0);
    double s_min = 0.0, s_max = 0.0;
    for (double v : z) {
      s_min += std::exp(-kappa * v);
      s_max += std::exp(kappa * v);
    }
    const double naive_min = -std::log(s_min) / kappa;
    const double naive_max = std::log(s_max) / kappa - std::log(static_cast<double>(n)) / kappa;
    worst_shift = std::max(worst_shift, rel_err(naive_min, stable_softmin(z, kappa)));
    worst_shift = std::max(worst_shift, rel_err(naive_max, stable_softmax(z, kappa)));
  }
  ck.bound("shifted form matches naive form", worst_shift, 1e-10);

  // Smoothstep: endpoint values, vanishing derivatives, derivative FD.
  {
    double worst_ends = 0.0, worst_fd = 0.0;
    bool in_range = true;
    for (int r = 1; r <= 8; ++r) {
      for (int kind = 0; kind < 2; ++kind) {
        if (kind == 1 && r > 2) continue;
        SmoothstepSpec spec;
        spec.kind = kind == 0 ? SmoothstepSpec::Kind::Polynomial : SmoothstepSpec::Kind::Sinusoidal;
        spec.r = r;
        spec.nu = (r % 2 == 0) ? 2.0 : 1.0;
        const auto at0 = smoothstep_jet(0.0, spec);
        const auto at1 = smoothstep_jet(1.0 / spec.nu, spec);
        worst_ends = std::max({worst_ends, std::abs(at0.value), std::abs(at0.d1),
                               std::abs(at0.d2), std::abs(at1.value - 1.0), std::abs(at1.d1),
                               std::abs(at1.d2)});
        for (int it = 0; it < 200; ++it) {
          const double t = rng.uniform(-0.2, 1.2 / spec.nu);
          const auto j = smoothstep_jet(t, spec);
          in_range = in_range && j.value >= 0.0 && j.value <= 1.0;
          const double h = 1e-6;
          const double vp = smoothstep_jet(t + h, spec).value;
          const double vm = smoothstep_jet(t - h, spec).value;
          const double d1p = smoothstep_jet(t + h, spec).d1;
          const double d1m = smoothstep_jet(t - h, spec).d1;
          if (std::abs(t) > 2.0 * h && std::abs(t - 1.0 / spec.nu) > 2.0 * h) {
            worst_fd = std::max(worst_fd, std::abs((vp - vm) / (2.0 * h) - j.d1));
            worst_fd = std::max(worst_fd, std::abs((d1p - d1m) / (2.0 * h) - j.d2));
          }
        }
      }
    }
    ck.bound("smoothstep endpoint values and derivatives", worst_ends, 1e-12);
    ck.bound("smoothstep derivative finite differences", worst_fd, 1e-6);
    ck.add("smoothstep stays in [0,1]", in_range, "sampled across the transition");
  }

  return ck.report;
}

// ===========================================================================
// jets
// ===========================================================================

SuiteReport verify_jets(std::uint64_t seed) {
  Checker ck;
  ck.report.suite = "jets";
  SplitMix64 rng(seed ^ 0x1e75);
  const double h = 1e-5;

  // Blended jets of synthetic quadratics against finite differences.
  {
    double worst = 0.0;
    for (int it = 0; it < 200; ++it) {
      const int n = 2 + static_cast<int>(rng.next() % 3);
      const int count = 2 + static_cast<int>(rng.next() % 4);
      struct Quad {
        Mat A;
        Vec b;
        double c, dt_lin, dt_quad;
      };
      std::vector<Quad> qs(count);
      for (auto& q : qs) {
        Mat A(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) A(i, j) = 0.3 * rng.normal();
        q.A = 0.5 * (A + A.transpose());
        q.b = Vec::NullaryExpr(n, [&](Eigen::Index) { return rng.normal(); });
        q.c = rng.normal();
        q.dt_lin = rng.normal();
        q.dt_quad = 0.3 * rng.normal();
      }
      const double kappa = rng.uniform(1.0, 20.0);
      const BlendMode mode = (it % 2 == 0) ? BlendMode::Min : BlendMode::Max;

      const auto jet_of = [&](const Quad& q, double t, const Vec& x) {
        ScalarJet2 j(n);
        j.value = 0.5 * x.dot(q.A * x) + q.b.dot(x) + q.c + q.dt_lin * t + q.dt_quad * t * t;
        j.dt = q.dt_lin + 2.0 * q.dt_quad * t;
        j.dtt = 2.0 * q.dt_quad;
        j.grad = q.A * x + q.b;
        j.hess = q.A;
        return j;
      };
      const auto value_at = [&](double t, const Vec& x) {
        std::vector<double> vals(qs.size());
        for (size_t i = 0; i < qs.size(); ++i) vals[i] = jet_of(qs[i], t, x).value;
        return mode == BlendMode::Min ? stable_softmin(vals, kappa) : stable_softmax(vals, kappa);
      };

      const double t0 = rng.uniform(-1.0, 1.0);
      const Vec x0 = Vec::NullaryExpr(n, [&](Eigen::Index) { return rng.normal(); });
      const auto blended = [&](double t, const Vec& x) {
        std::vector<ScalarJet2> args(qs.size());
        for (size_t i = 0; i < qs.size(); ++i) args[i] = jet_of(qs[i], t, x);
        return softblend_jet(args, kappa, mode);
      };

      std::vector<ScalarJet2> args(qs.size());
      for (size_t i = 0; i < qs.size(); ++i) args[i] = jet_of(qs[i], t0, x0);
      std::vector<double> w;
      const ScalarJet2 blend = softblend_jet(args, kappa, mode, &w);
      double wsum = 0.0, wmin = 1.0;
      for (double wi : w) {
        wsum += wi;
        wmin = std::min(wmin, wi);
      }
      worst = std::max(worst, std::abs(wsum - 1.0));
      worst = std::max(worst, std::max(0.0, -wmin));
      worst = std::max(worst, rel_err(value_at(t0, x0), blend.value));

      worst = std::max(worst, jet_fd_error(blended, t0, x0, h));
    }
    ck.bound("blended jets match finite differences", worst, 1e-5);
  }

  // Barrier jets, both scan dimensions.
  {
    double worst = 0.0;
    for (int dim = 2; dim <= 3; ++dim) {
      const int state_dim = dim == 2 ? 4 : 6;
      for (int scan_it = 0; scan_it < 5; ++scan_it) {
        Scan scan = dim == 2 ? random_scan_2d(rng, 15) : random_scan_3d(rng, 15);
        BarrierConfig bc;
        bc.max_range = 5.0;
        bc.rho = (scan_it % 2 == 0) ? 20.0 : 30.0;
        if (dim == 2 && scan_it % 2 == 1) {
          scan.heading = rng.uniform(0.0, 2.0 * M_PI);
          bc.fov = 2.0 * M_PI / 3.0;
        }
        const PerceptionBarrier b = synthesize_barrier(scan, bc);
        const auto jets = [&](double, const Vec& xs) { return eval_barrier_jet(b, xs); };
        for (int it = 0; it < 100; ++it) {
          const Vec x = random_state_near(rng, scan.pose, state_dim, 3.5);
          const ScalarJet2 jet = eval_barrier_jet(b, x);
          worst = std::max(worst, rel_err(b.value(x.head(dim)), jet.value));
          worst = std::max(worst, jet_fd_error(jets, 0.0, x, h));
          worst = std::max(worst, std::abs(jet.dt) + std::abs(jet.dtt) + jet.dt_grad.norm());
        }
      }
    }
    ck.bound("barrier jets match finite differences", worst, 1e-5);
  }

  // Composite psi0 jets in time and space; weight laws.
  {
    double worst_fd = 0.0, worst_w = 0.0;
    for (int variant = 0; variant < 2; ++variant) {
      for (int dim = 2; dim <= 3; ++dim) {
        const int state_dim = dim == 2 ? 4 : 6;
        const int N = (variant == 0) ? 4 : 3;
        CompositeBarrier cb = make_history_composer(
            rng, N, dim, 7,
            variant == 0 ? CompositionVariant::InnerBlend : CompositionVariant::OuterBlend, 35.0);
        const double T = cb.config().period;
        const int k = cb.current_k();
        Vec pose(dim);
        pose.setZero();
        pose(0) = 0.25 * k + (dim == 2 ? 8.0 : 0.0);
        if (dim == 2) pose(1) = 8.0;
        if (dim == 3) pose(2) = 5.0;
        const auto jets = [&](double tt, const Vec& xs) { return cb.eval_psi0_jet(tt, xs); };
        for (int it = 0; it < 60; ++it) {
          const double t = T * (k + rng.uniform(0.02, 0.98));
          const Vec x = random_state_near(rng, pose, state_dim, 2.5);
          std::vector<double> mu;
          const ScalarJet2 jet = cb.eval_psi0_jet(t, x, &mu);
          double sum = 0.0, mn = 1.0;
          for (double m : mu) {
            sum += m;
            mn = std::min(mn, m);
          }
          worst_w = std::max(worst_w, std::abs(sum - 1.0));
          worst_w = std::max(worst_w, std::max(0.0, -mn));

          worst_fd = std::max(worst_fd, rel_err(cb.eval_psi0_value(t, x), jet.value));
          worst_fd = std::max(worst_fd, jet_fd_error(jets, t, x, h));
        }
      }
    }
    ck.bound("composite jets match finite differences", worst_fd, 1e-5);
    ck.bound("weights nonnegative and sum to one", worst_w, 1e-12);
  }

  // Chain gradient by finite differences; chained Lie-derivative identities.
  {
    double worst_fd = 0.0, worst_lie = 0.0, worst_mu_combo = 0.0;
    for (int dim = 2; dim <= 3; ++dim) {
      const SystemModel mdl = (dim == 2) ? unicycle_model() : double_integrator_model();
      CompositeBarrier cb =
          make_history_composer(rng, 2, dim, 5, CompositionVariant::InnerBlend, 35.0);
      const double T = cb.config().period;
      const int k = cb.current_k();
      Vec pose(dim);
      pose.setZero();
      pose(0) = 0.25 * k + (dim == 2 ? 8.0 : 0.0);
      if (dim == 2) pose(1) = 8.0;
      if (dim == 3) pose(2) = 5.0;
      for (int it = 0; it < 60; ++it) {
        const double t = T * (k + rng.uniform(0.05, 0.95));
        const Vec x = random_state_near(rng, pose, mdl.n, 2.5);
        const PsiChainResult chain = cb.eval_psi_chain(t, x, mdl);

        const auto psi1_at = [&](double tt, const Vec& xs) {
          return cb.eval_psi_chain(tt, xs, mdl).psi1;
        };
        const auto fx = [&](const Vec& xs) { return psi1_at(t, xs); };
        worst_fd = std::max(worst_fd, rel_err(fd_gradient_rich(fx, x, h), chain.grad_psi1));
        worst_fd = std::max(
            worst_fd,
            rel_err(central_diff_rich([&](double d) { return psi1_at(t + d, x); }, h),
                    chain.dpsi1_dt));

        // Lg psi1 equals Lg Lf psi0 (positions enter the input map nowhere).
        const ScalarJet2 psi0 = cb.eval_psi0_jet(t, x);
        const Vec grad_lf = psi0.hess * mdl.f(x) + mdl.jac_f(x).transpose() * psi0.grad;
        worst_lie = std::max(
            worst_lie, (mdl.g(x).transpose() * grad_lf - chain.Lg_psi1).norm());

        // ...and equals the weight-combined slot contributions.
        std::vector<double> mu;
        cb.eval_psi0_jet(t, x, &mu);
        Vec combo = Vec::Zero(mdl.m);
        for (int j = 0; j < static_cast<int>(mu.size()); ++j) {
          const ScalarJet2 bj = eval_barrier_jet(cb.slot(j), x);
          const Vec grad_lf_b = bj.hess * mdl.f(x) + mdl.jac_f(x).transpose() * bj.grad;
          combo += mu[static_cast<size_t>(j)] * (mdl.g(x).transpose() * grad_lf_b);
        }
        worst_mu_combo = std::max(worst_mu_combo, (combo - chain.Lg_psi1).norm());
      }
    }
    ck.bound("chain gradient matches finite differences", worst_fd, 1e-5);
    ck.bound("input-side chain derivative identity", worst_lie, 1e-10);
    ck.bound("weight-combined slot derivatives", worst_mu_combo, 1e-10);
  }

  // Continuity across epoch boundaries under fresh pushes.
  {
    double worst = 0.0;
    SplitMix64 rng2 = rng.fork(7);
    CompositeBarrier cb =
        make_history_composer(rng2, 3, 2, 4, CompositionVariant::InnerBlend, 35.0);
    BarrierConfig bc;
    bc.max_range = 5.0;
    bc.rho = 25.0;
    const double T = cb.config().period;
    const double eps = 1e-6;
    const int k_last = cb.current_k() + 11;
    for (int k = cb.current_k() + 1; k <= k_last; ++k) {
      Vec pose(2);
      pose << 8.0 + 0.25 * k, 8.0;
      std::vector<Vec> samples;
      for (int it = 0; it < 12; ++it) samples.push_back(random_state_near(rng2, pose, 4, 2.0));
      std::vector<ScalarJet2> before;
      for (const Vec& x : samples) before.push_back(cb.eval_psi0_jet(k * T - eps, x));

      Scan scan = random_scan_2d(rng2, 12);
      scan.pose = pose;
      scan.index_k = k;
      cb.push_perception(synthesize_barrier(scan, bc), k);

      for (size_t i = 0; i < samples.size(); ++i) {
        const ScalarJet2 after = cb.eval_psi0_jet(k * T + eps, samples[i]);
        const ScalarJet2& b = before[i];
        const double rate = std::max({std::abs(b.dt), std::abs(after.dt), 1.0});
        worst = std::max(worst, std::abs(after.value - b.value) / (2.0 * eps * rate));
        const double rate2 = std::max({std::abs(b.dtt), std::abs(after.dtt), 1.0});
        worst = std::max(worst, std::abs(after.dt - b.dt) / (2.0 * eps * rate2));
        const double grate = std::max({b.dt_grad.norm(), after.dt_grad.norm(), 1.0});
        worst = std::max(worst, (after.grad - b.grad).norm() / (2.0 * eps * grate));
      }
    }
    ck.bound("snapshot handover is continuous", worst, 1.5);
  }

  return ck.report;
}

// ===========================================================================
// controller
// ===========================================================================

SuiteReport verify_controller(std::uint64_t seed) {
  Checker ck;
  ck.report.suite = "controller";
  SplitMix64 rng(seed ^ 0xc0de);
  const Vec x = Vec::Zero(4);

  // Closed form vs numerical oracle, constraint tightness, multiplier sign.
  {
    double worst_match = 0.0, worst_tight = 0.0, worst_lambda = 0.0;
    for (int it = 0; it < 1000; ++it) {
      const int m = 2 + static_cast<int>(rng.next() % 2);
      const PsiChainResult chain = random_chain(rng, m, 4);
      const FilterConfig cfg = random_filter(rng, m, 200.0);
      const ControlOutput out = compute_control(0.0, x, chain, cfg);
      const QpOracleResult oracle = qp_oracle(0.0, x, chain, cfg);
      worst_match = std::max(worst_match, (out.u_star - oracle.u).lpNorm<Eigen::Infinity>());
      worst_match = std::max(worst_match, std::abs(out.mu_star - oracle.mu));
      worst_tight = std::max(
          worst_tight, std::abs(out.constraint_value - std::max(0.0, out.omega)));
      worst_lambda = std::max(worst_lambda, -out.lambda);
    }
    ck.bound("closed form matches the numerical oracle", worst_match, 1e-6);
    ck.bound("filtered pair meets the constraint exactly", worst_tight, 1e-9);
    ck.bound("multiplier stays nonnegative", worst_lambda, 0.0);
  }

  // Sampled global optimality: no feasible pair beats the closed form.
  {
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
      const int m = 2;
      const PsiChainResult chain = random_chain(rng, m, 4);
      const FilterConfig cfg = random_filter(rng, m, 200.0);
      const ControlOutput out = compute_control(0.0, x, chain, cfg);
      const Mat Q = cfg.Q(0.0, x);
      const Vec c = cfg.c(0.0, x);
      const auto cost = [&](const Vec& u, double mu) {
        return 0.5 * u.dot(Q * u) + c.dot(u) + 0.5 * cfg.gamma * mu * mu;
      };
      const double best = cost(out.u_star, out.mu_star);
      Vec a(m + 1);
      a.head(m) = chain.Lg_psi1;
      a(m) = chain.psi1;
      for (int s = 0; s < 1000; ++s) {
        Vec w(m + 1);
        for (int i = 0; i <= m; ++i) w(i) = rng.normal();
        w *= rng.uniform(0.0, 3.0);
        Vec cand(m + 1);
        cand.head(m) = out.u_star + w.head(m);
        cand(m) = out.mu_star + w(m);
        const double b = constraint_value(chain, cand.head(m), cand(m), cfg.alpha);
        if (b < 0.0) cand -= (b / a.squaredNorm()) * a;  // project onto the constraint plane
        worst = std::max(worst, best - cost(cand.head(m), cand(m)));
      }
    }
    ck.bound("no sampled feasible pair beats the closed form", worst, 1e-9);
  }

  // Slack vanishes as gamma grows, at states with the constraint active.
  {
    bool monotone = true;
    for (int it = 0; it < 200; ++it) {
      const int m = 2;
      PsiChainResult chain = random_chain(rng, m, 4);
      chain.psi1 = rng.uniform(0.2, 2.0);
      chain.dpsi1_dt = -50.0 - 20.0 * rng.uniform();  // force omega < 0
      double prev = 1e300;
      for (double gamma : {1e2, 1e4, 1e6}) {
        FilterConfig cfg = random_filter(rng, m, gamma);
        cfg.alpha = ExtendedClassK::linear(1.0);
        const ControlOutput out = compute_control(0.0, x, chain, cfg);
        if (out.omega >= 0.0) break;
        monotone = monotone && std::abs(out.mu_star) <= prev + 1e-15;
        prev = std::abs(out.mu_star);
      }
    }
    ck.add("slack decays as its weight grows", monotone, "gamma ladder 1e2,1e4,1e6");
  }

  // Empirical continuity: output perturbations scale with input perturbations.
  {
    double worst = 0.0;
    for (int it = 0; it < 200; ++it) {
      const int m = 2;
      const PsiChainResult chain = random_chain(rng, m, 4);
      const FilterConfig cfg = random_filter(rng, m, 200.0);
      const ControlOutput base = compute_control(0.0, x, chain, cfg);

      const auto perturbed = [&](double mag) {
        PsiChainResult ch = chain;
        SplitMix64 local = rng.fork(static_cast<std::uint64_t>(it));
        ch.psi1 += mag * local.normal();
        ch.dpsi1_dt += mag * local.normal();
        ch.Lf_psi1 += mag * local.normal();
        for (int i = 0; i < m; ++i) ch.Lg_psi1(i) += mag * local.normal();
        const ControlOutput out = compute_control(0.0, x, ch, cfg);
        return (out.u_star - base.u_star).norm() + std::abs(out.mu_star - base.mu_star) +
               std::abs(out.lambda - base.lambda);
      };
      const double big = perturbed(1e-4) / 1e-4;   // local Lipschitz estimate
      const double small = perturbed(1e-6) / 1e-6;
      if (big > 1e-9) worst = std::max(worst, small / (10.0 * big + 1.0));
    }
    ck.bound("outputs scale linearly under small perturbations", worst, 1.0);
  }

  return ck.report;
}

// ===========================================================================
// invariance
// ===========================================================================

namespace {

void check_invariance_run(Checker& ck, const std::string& label, const ScenarioBundle& bundle,
                          double settle_limit) {
  TrajectoryLog log;
  try {
    log = run_scenario(bundle.config, bundle.world);
  } catch (const std::exception& e) {
    ck.add(label + ": run completes", false, e.what());
    return;
  }

  ck.add(label + ": psi0 positive", log.metrics.min_psi0 > 0.0,
         "min psi0 " + fmt(log.metrics.min_psi0));
  ck.add(label + ": psi1 positive", log.min_psi1 > 0.0, "min psi1 " + fmt(log.min_psi1));
  ck.add(label + ": clearance positive", log.min_clearance > 0.0,
         "min clearance " + fmt(log.min_clearance));
  ck.add(label + ": goal reached in time",
         log.metrics.reached && log.metrics.settling_time_s <= settle_limit,
         "settling " + fmt(log.metrics.settling_time_s) + " s");

  // Smoothness across epoch boundaries and between adjacent samples.
  double worst_jump = 0.0, worst_rate_jump = 0.0, worst_spike = 0.0;
  for (size_t i = 0; i + 1 < log.rows.size(); ++i) {
    const LogRow& a = log.rows[i];
    const LogRow& b = log.rows[i + 1];
    const double dt = b.t - a.t;
    const double rate_a = std::abs(a.dpsi0_dt) + a.grad_psi0_norm * a.state_rate_norm;
    const double rate_b = std::abs(b.dpsi0_dt) + b.grad_psi0_norm * b.state_rate_norm;
    const double lim = 10.0 * std::max(rate_a, rate_b) * dt + 1e-9;
    if (b.k != a.k) {
      worst_jump = std::max(worst_jump, std::abs(b.psi0 - a.psi0) - lim);
      const double rate2_a = std::abs(a.dpsi0_dtt) + a.dt_grad_psi0_norm * a.state_rate_norm;
      const double rate2_b = std::abs(b.dpsi0_dtt) + b.dt_grad_psi0_norm * b.state_rate_norm;
      const double lim2 = 10.0 * std::max(rate2_a, rate2_b) * dt + 1e-9;
      worst_rate_jump = std::max(worst_rate_jump, std::abs(b.dpsi0_dt - a.dpsi0_dt) - lim2);
    }
    // Trapezoid residual minus the slope-change allowance: zero for any step
    // whose rate varies monotonically, of jump size for a true discontinuity.
    const double predicted = 0.5 * (a.dpsi0_total + b.dpsi0_total) * dt;
    const double allowance = dt * std::abs(b.dpsi0_total - a.dpsi0_total);
    worst_spike = std::max(
        worst_spike, std::abs(b.psi0 - a.psi0 - predicted) - allowance);
  }
  ck.bound(label + ": psi0 jumps within the jet bound", worst_jump, 0.0);
  ck.bound(label + ": psi0 rate jumps within the jet bound", worst_rate_jump, 0.0);
  ck.bound(label + ": no discontinuity spikes", worst_spike, 1e-3);

  // Weight laws at every logged control step.
  double worst_w = 0.0;
  for (const auto& row : log.rows) {
    if (!row.control_step) continue;
    worst_w = std::max(worst_w, std::abs(row.mu_sum - 1.0));
    worst_w = std::max(worst_w, std::max(0.0, -row.mu_min));
  }
  ck.bound(label + ": weights sum to one at control steps", worst_w, 1e-12);
}

}  // namespace

SuiteReport verify_invariance(std::uint64_t seed) {
  Checker ck;
  ck.report.suite = "invariance";

  for (const std::string name :
       {"ground_static", "ground_dynamic", "ground_fov120", "quadrotor_static"}) {
    ScenarioBundle bundle = builtin_scenario(name);
    bundle.config.seed = seed;
    check_invariance_run(ck, name, bundle, 15.0);
    bundle.config.variant = CompositionVariant::OuterBlend;
    check_invariance_run(ck, name + " (window crossfade)", bundle, 15.0);
  }

  // Variant agreement at N=1 on random windows.
  {
    SplitMix64 rng(seed ^ 0x46aa);
    double worst = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
      SplitMix64 seq = rng.fork(static_cast<std::uint64_t>(rep));
      SplitMix64 seq2 = seq;  // identical barrier history for both variants
      CompositeBarrier a = make_history_composer(seq, 1, 2, 5, CompositionVariant::InnerBlend, 30.0);
      CompositeBarrier b = make_history_composer(seq2, 1, 2, 5, CompositionVariant::OuterBlend, 30.0);
      const double T = a.config().period;
      const int k = a.current_k();
      Vec pose(2);
      pose << 8.0 + 0.25 * k, 8.0;
      for (int it = 0; it < 250; ++it) {
        const double t = T * (k + rng.uniform(0.0, 0.999));
        const Vec x = random_state_near(rng, pose, 4, 3.0);
        const ScalarJet2 ja = a.eval_psi0_jet(t, x);
        const ScalarJet2 jb = b.eval_psi0_jet(t, x);
        worst = std::max(worst, std::abs(ja.value - jb.value));
        worst = std::max(worst, (ja.grad - jb.grad).norm());
        worst = std::max(worst, std::abs(ja.dt - jb.dt));
      }
    }
    ck.bound("composition variants agree for a single-slot window", worst, 1e-12);
  }

  return ck.report;
}

std::vector<SuiteReport> verify_all(std::uint64_t seed) {
  return {verify_softmath(seed), verify_jets(seed), verify_controller(seed),
          verify_invariance(seed)};
}

}  // namespace safenav
