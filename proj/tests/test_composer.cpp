#include <doctest.h>

#include <cmath>

#include "safenav/composer.hpp"
#include "safenav/rng.hpp"

using namespace safenav;

namespace {

BarrierConfig barrier_cfg() {
  BarrierConfig cfg;
  cfg.max_range = 5.0;
  cfg.rho = 25.0;
  return cfg;
}

PerceptionBarrier snapshot_at(SplitMix64& rng, double px, int k, int n_points = 10) {
  Scan s;
  s.dim = 2;
  s.pose = Vec(2);
  s.pose << px, 8.0;
  s.index_k = k;
  for (int i = 0; i < n_points; ++i)
    s.points.push_back({rng.uniform(1.0, 4.5), rng.uniform(0.0, 2.0 * M_PI), 0.0});
  return synthesize_barrier(s, barrier_cfg());
}

ComposerConfig composer_cfg(int n, CompositionVariant variant = CompositionVariant::InnerBlend) {
  ComposerConfig cfg;
  cfg.window_n = n;
  cfg.period = 0.2;
  cfg.kappa = 30.0;
  cfg.eta.kind = SmoothstepSpec::Kind::Polynomial;
  cfg.eta.r = 2;
  cfg.eta.nu = 2.0;
  cfg.variant = variant;
  cfg.alpha0 = ExtendedClassK::linear(35.0);
  return cfg;
}

}  // namespace

TEST_CASE("bootstrap fills the whole window with the first snapshot") {
  SplitMix64 rng(1);
  CompositeBarrier cb(composer_cfg(4));
  const PerceptionBarrier b0 = snapshot_at(rng, 8.0, 0);
  cb.push_perception(b0, 0);
  REQUIRE(cb.current_k() == 0);

  // with all slots identical the composition collapses to the snapshot itself
  for (int it = 0; it < 50; ++it) {
    Vec x(4);
    x << rng.uniform(5.0, 11.0), rng.uniform(5.0, 11.0), rng.uniform(-1.0, 1.0), 0.0;
    const double t = rng.uniform(0.0, 0.199);
    CHECK(cb.eval_psi0_value(t, x) ==
          doctest::Approx(b0.value(x.head(2))).epsilon(1e-12));
    // and the time partial vanishes: entering and exiting slots are equal
    const ScalarJet2 jet = cb.eval_psi0_jet(t, x);
    CHECK(std::abs(jet.dt) < 1e-12);
    CHECK(std::abs(jet.dtt) < 1e-12);
  }
}

TEST_CASE("push sequencing contract") {
  SplitMix64 rng(2);
  CompositeBarrier cb(composer_cfg(2));
  CHECK_THROWS_AS(cb.push_perception(snapshot_at(rng, 8.0, 1), 1), SequencingError);
  cb.push_perception(snapshot_at(rng, 8.0, 0), 0);
  cb.push_perception(snapshot_at(rng, 8.2, 1), 1);
  cb.push_perception(snapshot_at(rng, 8.4, 2), 2);
  CHECK_THROWS_AS(cb.push_perception(snapshot_at(rng, 8.6, 4), 4), SequencingError);
  CHECK_THROWS_AS(cb.push_perception(snapshot_at(rng, 8.6, 2), 2), SequencingError);

  // evaluation outside the current epoch is a sequencing error
  Vec x = Vec::Zero(4);
  x << 8.3, 8.0, 0.0, 0.0;
  CHECK_NOTHROW(cb.eval_psi0_value(0.45, x));
  CHECK_THROWS_AS(cb.eval_psi0_value(0.15, x), SequencingError);
  CHECK_THROWS_AS(cb.eval_psi0_value(0.65, x), SequencingError);
  CHECK_THROWS_AS(cb.eval_psi0_value(-0.1, x), SequencingError);
}

TEST_CASE("single-slot window crossfades between the two snapshots") {
  SplitMix64 rng(3);
  CompositeBarrier cb(composer_cfg(1));
  const PerceptionBarrier b0 = snapshot_at(rng, 8.0, 0);
  const PerceptionBarrier b1 = snapshot_at(rng, 8.4, 1);
  cb.push_perception(b0, 0);
  cb.push_perception(b1, 1);

  Vec x(4);
  x << 8.5, 8.3, 0.5, 0.2;
  const double T = 0.2;
  // at the epoch start the homotopy has not begun: previous snapshot only
  CHECK(cb.eval_psi0_value(T, x) == doctest::Approx(b0.value(x.head(2))).epsilon(1e-12));
  // after the transition completes (nu = 2 -> half a period) the new one rules
  for (double s : {0.5, 0.7, 0.95}) {
    CHECK(cb.eval_psi0_value(T * (1.0 + s), x) ==
          doctest::Approx(b1.value(x.head(2))).epsilon(1e-12));
  }
  // in between: exact convex combination
  const double s = 0.25;
  const double eta = smoothstep_jet(s, composer_cfg(1).eta).value;
  CHECK(cb.eval_psi0_value(T * (1.0 + s), x) ==
        doctest::Approx(eta * b1.value(x.head(2)) + (1.0 - eta) * b0.value(x.head(2)))
            .epsilon(1e-12));

  // benign geometry: the input-authority monitor stays quiet
  const PsiChainResult chain = cb.eval_psi_chain(T * 1.3, x, unicycle_model());
  CHECK(!chain.hull_condition_violated);
}

TEST_CASE("weights are a convex combination and respect the homotopy split") {
  SplitMix64 rng(4);
  const int N = 4;
  CompositeBarrier cb(composer_cfg(N));
  for (int k = 0; k <= N + 1; ++k)
    cb.push_perception(snapshot_at(rng, 8.0 + 0.2 * k, k), k);

  const double T = 0.2;
  const int k = cb.current_k();
  for (int it = 0; it < 100; ++it) {
    const double s = rng.uniform(0.0, 0.999);
    Vec x(4);
    x << rng.uniform(7.0, 10.0), rng.uniform(6.0, 10.0), 0.3, 0.1;
    std::vector<double> mu;
    cb.eval_psi0_jet(T * (k + s), x, &mu);
    REQUIRE(mu.size() == static_cast<size_t>(N) + 1);
    double sum = 0.0;
    for (double m : mu) {
      CHECK(m >= -1e-15);
      sum += m;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // newest and oldest slots share one soft-max weight through eta
    const double eta = smoothstep_jet(s, composer_cfg(N).eta).value;
    if (eta > 1e-9 && eta < 1.0 - 1e-9)
      CHECK(mu[0] / eta == doctest::Approx(mu[N] / (1.0 - eta)).epsilon(1e-9));
  }
}

TEST_CASE("chain step: hand-computed value for a synthetic field") {
  // psi0 = 1 - qx^2, time-invariant, on the unicycle at x = (0.5, 0, 1, 0)
  const SystemModel mdl = unicycle_model();
  Vec x(4);
  x << 0.5, 0.0, 1.0, 0.0;
  ScalarJet2 psi0(4);
  psi0.value = 1.0 - 0.25;
  psi0.grad << -1.0, 0.0, 0.0, 0.0;
  psi0.hess(0, 0) = -2.0;

  const PsiChainResult chain = build_psi_chain(psi0, x, mdl, ExtendedClassK::linear(35.0));
  CHECK(chain.psi1 == doctest::Approx(25.25).epsilon(1e-13));  // 0 - 1 + 35*0.75
  CHECK(chain.dpsi1_dt == doctest::Approx(0.0));
  // grad psi1 = H f + jac_f^T grad + 35 grad
  // = (-2, 0, 0, 0) + (0, 0, -1, 0) + (-35, 0, 0, 0)
  Vec expected(4);
  expected << -37.0, 0.0, -1.0, 0.0;
  CHECK((chain.grad_psi1 - expected).norm() < 1e-12);
  CHECK(chain.Lf_psi1 == doctest::Approx(-37.0));
  CHECK(chain.Lg_psi1(0) == doctest::Approx(-1.0));
  CHECK(chain.Lg_psi1(1) == doctest::Approx(0.0));
}

TEST_CASE("chain rejects unsupported relative degree") {
  SystemModel mdl = unicycle_model();
  mdl.r = 3;
  Vec x = Vec::Zero(4);
  CHECK_THROWS_AS(build_psi_chain(ScalarJet2(4), x, mdl, ExtendedClassK::linear(1.0)),
                  ConfigError);
}

TEST_CASE("input-side derivative equals the weight-combined snapshot derivatives") {
  SplitMix64 rng(5);
  const int N = 3;
  CompositeBarrier cb(composer_cfg(N));
  for (int k = 0; k <= N + 2; ++k)
    cb.push_perception(snapshot_at(rng, 8.0 + 0.2 * k, k), k);
  const SystemModel mdl = unicycle_model();
  const double T = 0.2;
  const int k = cb.current_k();

  for (int it = 0; it < 100; ++it) {
    Vec x(4);
    x << rng.uniform(7.5, 10.5), rng.uniform(6.0, 10.0), rng.uniform(-2.0, 2.0),
        rng.uniform(0.0, 2.0 * M_PI);
    const double t = T * (k + rng.uniform(0.0, 0.999));
    const PsiChainResult chain = cb.eval_psi_chain(t, x, mdl);

    Vec combo = Vec::Zero(mdl.m);
    const Vec f = mdl.f(x);
    const Mat g = mdl.g(x);
    const Mat jf = mdl.jac_f(x);
    for (int j = 0; j <= N; ++j) {
      const ScalarJet2 bj = eval_barrier_jet(cb.slot(j), x);
      combo += chain.mu[static_cast<size_t>(j)] *
               (g.transpose() * (bj.hess * f + jf.transpose() * bj.grad));
    }
    CHECK((combo - chain.Lg_psi1).norm() < 1e-10 * std::max(1.0, chain.Lg_psi1.norm()));
  }
}

TEST_CASE("composition is continuous through a perception handover") {
  SplitMix64 rng(6);
  const int N = 2;
  CompositeBarrier cb(composer_cfg(N));
  for (int k = 0; k <= N; ++k)
    cb.push_perception(snapshot_at(rng, 8.0 + 0.2 * k, k), k);
  const double T = 0.2;
  const double eps = 1e-6;

  for (int k = N + 1; k < N + 8; ++k) {
    std::vector<Vec> samples;
    for (int i = 0; i < 10; ++i) {
      Vec x(4);
      x << rng.uniform(7.5, 10.5), rng.uniform(6.5, 9.5), 0.4, 1.0;
      samples.push_back(x);
    }
    std::vector<ScalarJet2> before;
    for (const Vec& x : samples) before.push_back(cb.eval_psi0_jet(k * T - eps, x));
    cb.push_perception(snapshot_at(rng, 8.0 + 0.2 * k, k), k);
    for (size_t i = 0; i < samples.size(); ++i) {
      const ScalarJet2 after = cb.eval_psi0_jet(k * T + eps, samples[i]);
      const double rate = std::max({std::abs(before[i].dt), std::abs(after.dt), 1.0});
      CHECK(std::abs(after.value - before[i].value) <= rate * 2.0 * eps + 1e-12);
      const double rate2 = std::max({std::abs(before[i].dtt), std::abs(after.dtt), 1.0});
      CHECK(std::abs(after.dt - before[i].dt) <= rate2 * 2.0 * eps + 1e-10);
      const double grate = std::max({before[i].dt_grad.norm(), after.dt_grad.norm(), 1.0});
      CHECK((after.grad - before[i].grad).norm() <= grate * 2.0 * eps + 1e-10);
    }
  }
}

TEST_CASE("whenever the composition is nonnegative some window snapshot is too") {
  SplitMix64 rng(7);
  const int N = 3;
  CompositeBarrier cb(composer_cfg(N));
  for (int k = 0; k <= N + 1; ++k)
    cb.push_perception(snapshot_at(rng, 8.0 + 0.25 * k, k), k);
  const double T = 0.2;
  const int k = cb.current_k();

  int nonneg = 0;
  for (int it = 0; it < 2000; ++it) {
    Vec x(4);
    x << rng.uniform(4.0, 13.0), rng.uniform(4.0, 12.0), 0.0, 0.0;
    const double t = T * (k + rng.uniform(0.0, 0.999));
    const double psi0 = cb.eval_psi0_value(t, x);
    if (psi0 < 0.0) continue;
    ++nonneg;
    bool some = false;
    for (int j = 0; j <= N; ++j) some = some || cb.slot(j).value(x.head(2)) >= 0.0;
    CHECK(some);
    // at sample instants the entering snapshot has no weight yet
    const double at_kT = cb.eval_psi0_value(T * k, x);
    if (at_kT >= 0.0) {
      bool some_old = false;
      for (int j = 1; j <= N; ++j) some_old = some_old || cb.slot(j).value(x.head(2)) >= 0.0;
      CHECK(some_old);
    }
  }
  CHECK(nonneg > 200);
}

TEST_CASE("both composition variants coincide for a single-slot window") {
  SplitMix64 rng(8);
  SplitMix64 rng2 = rng;  // identical snapshot history
  CompositeBarrier a(composer_cfg(1, CompositionVariant::InnerBlend));
  CompositeBarrier b(composer_cfg(1, CompositionVariant::OuterBlend));
  for (int k = 0; k <= 3; ++k) {
    a.push_perception(snapshot_at(rng, 8.0 + 0.2 * k, k), k);
    b.push_perception(snapshot_at(rng2, 8.0 + 0.2 * k, k), k);
  }
  const double T = 0.2;
  const int k = a.current_k();
  for (int it = 0; it < 1000; ++it) {
    Vec x(4);
    x << rng.uniform(7.0, 10.5), rng.uniform(6.0, 10.0), rng.uniform(-1.0, 1.0), 0.3;
    const double t = T * (k + rng.uniform(0.0, 0.999));
    CHECK(std::abs(a.eval_psi0_value(t, x) - b.eval_psi0_value(t, x)) <= 1e-12);
    const ScalarJet2 ja = a.eval_psi0_jet(t, x);
    const ScalarJet2 jb = b.eval_psi0_jet(t, x);
    CHECK(std::abs(ja.dt - jb.dt) <= 1e-12 * std::max(1.0, std::abs(ja.dt)));
    CHECK((ja.grad - jb.grad).norm() <= 1e-12 * std::max(1.0, ja.grad.norm()));
  }
}
