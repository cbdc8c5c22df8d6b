#include <benchmark/benchmark.h>

#include "safenav/composer.hpp"
#include "safenav/controller.hpp"
#include "safenav/rng.hpp"
#include "safenav/scenario_io.hpp"
#include "safenav/sim.hpp"

namespace {

using namespace safenav;

Scan make_scan(int points) {
  SplitMix64 rng(99);
  Scan scan;
  scan.dim = 2;
  scan.pose = Vec(2);
  scan.pose << 8.0, 8.0;
  for (int i = 0; i < points; ++i) {
    ScanPoint pt;
    pt.range = rng.uniform(0.8, 4.8);
    pt.azimuth = rng.uniform(0.0, 2.0 * M_PI);
    scan.points.push_back(pt);
  }
  return scan;
}

void SoftMax(benchmark::State& state) {
  SplitMix64 rng(1);
  std::vector<double> z(static_cast<size_t>(state.range(0)));
  for (auto& v : z) v = rng.uniform(-30.0, 30.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stable_softmax(z, 30.0));
  }
}
BENCHMARK(SoftMax)->Arg(8)->Arg(100);

void BarrierSynthesis(benchmark::State& state) {
  const Scan scan = make_scan(static_cast<int>(state.range(0)));
  BarrierConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_barrier(scan, cfg));
  }
}
BENCHMARK(BarrierSynthesis)->Arg(30)->Arg(100);

void BarrierJet(benchmark::State& state) {
  const Scan scan = make_scan(static_cast<int>(state.range(0)));
  BarrierConfig cfg;
  const PerceptionBarrier b = synthesize_barrier(scan, cfg);
  Vec x(4);
  x << 9.0, 7.5, 1.0, 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_barrier_jet(b, x));
  }
}
BENCHMARK(BarrierJet)->Arg(30)->Arg(100);

void PsiChain(benchmark::State& state) {
  SplitMix64 rng(7);
  ComposerConfig cc;
  cc.window_n = static_cast<int>(state.range(0));
  cc.eta.nu = 2.0;
  cc.alpha0 = ExtendedClassK::linear(35.0);
  CompositeBarrier cb(cc);
  BarrierConfig bc;
  for (int k = 0; k <= cc.window_n + 1; ++k) {
    Scan scan = make_scan(60);
    scan.pose(0) += 0.2 * k;
    cb.push_perception(synthesize_barrier(scan, bc), k);
  }
  const SystemModel mdl = unicycle_model();
  Vec x(4);
  x << 8.5, 8.2, 1.0, 0.4;
  const double t = cc.period * (cb.current_k() + 0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cb.eval_psi_chain(t, x, mdl));
  }
}
BENCHMARK(PsiChain)->Arg(1)->Arg(4);

void ControlStep(benchmark::State& state) {
  SplitMix64 rng(7);
  ComposerConfig cc;
  cc.window_n = 4;
  cc.eta.nu = 2.0;
  cc.alpha0 = ExtendedClassK::linear(35.0);
  CompositeBarrier cb(cc);
  BarrierConfig bc;
  for (int k = 0; k <= 5; ++k) {
    Scan scan = make_scan(60);
    scan.pose(0) += 0.2 * k;
    cb.push_perception(synthesize_barrier(scan, bc), k);
  }
  const SystemModel mdl = unicycle_model();
  Vec x(4);
  x << 8.5, 8.2, 1.0, 0.4;
  Vec goal(2);
  goal << 13.0, 12.0;
  FilterConfig filter = FilterConfig::minimum_intervention(
      [&](double, const Vec& xs) { return unicycle_desired_control(xs, goal, 0.5, 3.0, 3.0); },
      200.0, ExtendedClassK::linear(50.0), 2);
  const double t = cc.period * (cb.current_k() + 0.4);
  for (auto _ : state) {
    const PsiChainResult chain = cb.eval_psi_chain(t, x, mdl);
    benchmark::DoNotOptimize(compute_control(t, x, chain, filter));
  }
}
BENCHMARK(ControlStep);

}  // namespace

BENCHMARK_MAIN();
