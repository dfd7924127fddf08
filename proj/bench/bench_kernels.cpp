// Serial reference vs OpenMP kernels on the default 1640-state model and a
// larger truncation. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "aod/simulator.hpp"

namespace {

using namespace aod;

const MdpModel& model_for(int cap) {
  static const MdpModel small(Dtmc::two_state(0.02, 0.01), 0.8, {20, 20});
  static const MdpModel large(Dtmc::two_state(0.02, 0.01), 0.8, {80, 80});
  return cap == 20 ? small : large;
}

template <kernels::Backend B>
void BM_BellmanBackup(benchmark::State& state) {
  const auto& m = model_for(static_cast<int>(state.range(0)));
  std::vector<double> h(static_cast<std::size_t>(m.size()), 0.0), next(h.size());
  std::vector<Action> act(h.size());
  for (auto _ : state) {
    const auto r = kernels::bellman_backup(B, m.table(), 0.3, 0.0, 1e-12, h, next, act);
    benchmark::DoNotOptimize(r);
    h.swap(next);
  }
  state.SetItemsProcessed(state.iterations() * m.size());
}

void BM_PropagateSerial(benchmark::State& state) {
  const auto& m = model_for(static_cast<int>(state.range(0)));
  const auto chain = kernels::induce(m.table(), PurePolicy::constant(m.size(), 1).actions());
  std::vector<double> x(static_cast<std::size_t>(m.size()), 1.0 / m.size()), y(x.size());
  for (auto _ : state) {
    kernels::serial::propagate(chain, 0.25, x, y);
    x.swap(y);
  }
  state.SetItemsProcessed(state.iterations() * m.size());
}

void BM_PropagateOpenMP(benchmark::State& state) {
  const auto& m = model_for(static_cast<int>(state.range(0)));
  const auto back =
      kernels::transpose(kernels::induce(m.table(), PurePolicy::constant(m.size(), 1).actions()));
  std::vector<double> x(static_cast<std::size_t>(m.size()), 1.0 / m.size()), y(x.size());
  for (auto _ : state) {
    kernels::omp::propagate(back, 0.25, x, y);
    x.swap(y);
  }
  state.SetItemsProcessed(state.iterations() * m.size());
}

void BM_Replications(benchmark::State& state) {
  const Simulator sim(model_for(20));
  SimConfig cfg;
  cfg.horizon = 100'000;
  cfg.warmup = 1000;
  cfg.replications = 8;
  cfg.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim.run(policy::ZeroWait{}, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.replications * cfg.horizon);
}

}  // namespace

BENCHMARK(BM_BellmanBackup<aod::kernels::Backend::Serial>)->Arg(20)->Arg(80);
BENCHMARK(BM_BellmanBackup<aod::kernels::Backend::OpenMP>)->Arg(20)->Arg(80);
BENCHMARK(BM_PropagateSerial)->Arg(20)->Arg(80);
BENCHMARK(BM_PropagateOpenMP)->Arg(20)->Arg(80);
BENCHMARK(BM_Replications)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
