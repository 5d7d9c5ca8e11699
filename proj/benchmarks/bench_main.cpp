#include <benchmark/benchmark.h>

#include "malltwin/config.hpp"
#include "malltwin/dqn/trainer.hpp"
#include "malltwin/environment.hpp"
#include "malltwin/evaluation.hpp"
#include "malltwin/synthetic.hpp"

using namespace malltwin;

namespace {

const ScenarioConfig& config() {
  static const ScenarioConfig c = load_config(std::string(MALLTWIN_SOURCE_DIR) + "/configs/happy_mall.json");
  return c;
}

void BM_Forward(benchmark::State& state) {
  Rng rng(1);
  const int hidden = static_cast<int>(state.range(0));
  const auto net = dqn::QNetwork::he_uniform({14, hidden, hidden, 25}, rng);
  std::vector<double> x(14, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(128);

void BM_TrainStep(benchmark::State& state) {
  Rng rng(2);
  dqn::TrainConfig cfg;
  auto net = dqn::QNetwork::he_uniform({14, 128, 128, 25}, rng);
  auto target = net;
  dqn::Adam adam(net, cfg.learning_rate);
  dqn::ReplayBuffer buf(1000);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> s(14), n(14);
    for (auto& v : s) v = rng.uniform();
    for (auto& v : n) v = rng.uniform();
    buf.push({s, static_cast<int>(rng.below(25)), rng.uniform(), n, i % 20 == 19});
  }
  for (auto _ : state) benchmark::DoNotOptimize(dqn::train_step(net, target, adam, buf, cfg, rng));
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMicrosecond);

void BM_EnvironmentEpisode(benchmark::State& state) {
  const auto& c = config();
  const auto day = generate_day_synthetic(c, 3, "bench");
  const auto zones = make_zones(c.mall, Topology::Centralized);
  const auto trace = zone_traces(c, day, zones)[0];
  for (auto _ : state) {
    ZoneEnvironment env(c, zones[0], trace, c.reward);
    env.reset();
    while (!env.done()) benchmark::DoNotOptimize(env.step(16));
  }
}
BENCHMARK(BM_EnvironmentEpisode)->Unit(benchmark::kMicrosecond);

void BM_SyntheticDay(benchmark::State& state) {
  const auto& c = config();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_day_synthetic(c, ++seed, "bench"));
}
BENCHMARK(BM_SyntheticDay)->Unit(benchmark::kMicrosecond);

void BM_DistributedRollout(benchmark::State& state) {
  const auto& c = config();
  const auto days = generate_synthetic_dataset(c, 4, 10);
  const auto policy = Policy::setpoint(25.0);
  for (auto _ : state) benchmark::DoNotOptimize(rollout(policy, days, Topology::Distributed, c, c.reward));
}
BENCHMARK(BM_DistributedRollout)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
