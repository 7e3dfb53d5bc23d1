#include <benchmark/benchmark.h>

#include "officedr/baselines.hpp"
#include "officedr/office_config.hpp"
#include "officedr/sac_agent.hpp"

using namespace officedr;

static void BM_EnvStepCurtailShift(benchmark::State& state) {
  OfficeSpec spec = evaluation_office_spec();
  spec.persons = static_cast<int>(state.range(0));
  OfficeEnv env(build_office(spec));
  const PriceSignal tou = tou_signal();
  for (auto _ : state) benchmark::DoNotOptimize(env.step(tou));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EnvStepCurtailShift)->Arg(10)->Arg(500);

static void BM_NetForwardBackward(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  const DenseNet net = DenseNet::mlp(20, {hidden, hidden}, 1, 1);
  Rng rng(2);
  Eigen::MatrixXd x(20, 256), y(1, 256);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
  const MeanSquaredError mse;
  for (auto _ : state) benchmark::DoNotOptimize(net_gradients(net, mse, x, y));
}
BENCHMARK(BM_NetForwardBackward)->Arg(64)->Arg(256);

static void BM_SacUpdate(benchmark::State& state) {
  SacConfig c;
  c.hidden = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  c.batch_size = static_cast<int>(state.range(1));
  c.buffer_capacity = 4096;
  SacAgent agent = SacAgent::create(c);
  ReplayBuffer buffer = make_replay_buffer(c);
  OfficeSpec spec = evaluation_office_spec();
  spec.persons = 10;
  OfficeEnv env(build_office(spec));
  train_online(agent, buffer, env, static_cast<std::uint64_t>(c.batch_size));
  for (auto _ : state) benchmark::DoNotOptimize(sac_update(agent, buffer));
}
BENCHMARK(BM_SacUpdate)->Args({64, 64})->Args({256, 256})->Unit(benchmark::kMillisecond);

static void BM_OracleDeterministic(benchmark::State& state) {
  OfficeSpec spec;
  spec.persons = static_cast<int>(state.range(0));
  spec.variant_weights = {1.0, 1.0, 1.0, 0.0};
  const OfficeConfig office = build_office(spec);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_deterministic(office));
}
BENCHMARK(BM_OracleDeterministic)->Arg(1)->Arg(30)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
