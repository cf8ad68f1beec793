#include "gwr/gwr.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

namespace {

gwr::Scenario scenario(const char* name) {
  return gwr::load_scenario(std::string(GWR_SCENARIO_DIR) + "/" + name + ".json");
}

// ring of n agents: consecutive distances plus one angle per agent
gwr::FrameworkSpec ring(int n) {
  gwr::FrameworkSpec s;
  s.n = n;
  for (int i = 0; i < n; ++i) {
    s.edges.push_back({i, (i + 1) % n, 1.0});
    s.angles.push_back({i, (i + 1) % n, (i + 2) % n, 0.3});
  }
  return s;
}

void BM_RigidityMatrix(benchmark::State& state) {
  const gwr::FrameworkSpec spec = ring(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  const gwr::Configuration cfg = gwr::sample_configuration(spec, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gwr::weak_rigidity_matrix(spec, cfg));
}
BENCHMARK(BM_RigidityMatrix)->Arg(6)->Arg(24)->Arg(96);

void BM_Classify(benchmark::State& state) {
  const gwr::FrameworkSpec spec = ring(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(2);
  const gwr::Configuration cfg = gwr::sample_configuration(spec, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gwr::classify(spec, cfg));
}
BENCHMARK(BM_Classify)->Arg(6)->Arg(24)->Arg(96);

void BM_ControlInput(benchmark::State& state) {
  const gwr::FrameworkSpec spec = ring(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(3);
  const gwr::Configuration cfg = gwr::sample_configuration(spec, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gwr::control_input(spec, cfg));
}
BENCHMARK(BM_ControlInput)->Arg(6)->Arg(24)->Arg(96);

void BM_InteractionMatrix(benchmark::State& state) {
  const gwr::Scenario sc = scenario("sim1");
  for (auto _ : state) benchmark::DoNotOptimize(gwr::interaction_matrix(sc.spec, sc.initial));
}
BENCHMARK(BM_InteractionMatrix);

// 1000 RK4 steps of the six-agent scenario
void BM_Simulate1000Steps(benchmark::State& state) {
  const gwr::Scenario sc = scenario("sim1");
  gwr::SimConfig c = sc.sim;
  c.t_max = 1000 * c.dt;
  c.err_tol = 1e-300;
  c.record_every = 1000;
  c.track_rw_rank = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(gwr::simulate(sc.spec, sc.initial, c));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Simulate1000Steps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ClassifyEquilibrium(benchmark::State& state) {
  const gwr::Scenario sc = scenario("sim3");
  for (auto _ : state) benchmark::DoNotOptimize(gwr::classify_equilibrium(sc.spec, *sc.desired));
}
BENCHMARK(BM_ClassifyEquilibrium);

}  // namespace

BENCHMARK_MAIN();
