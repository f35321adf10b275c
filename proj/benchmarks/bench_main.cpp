#include "leolora/netsim.hpp"
#include "leolora/phy.hpp"
#include "leolora/simcore/engine.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace leolora;

void BM_SingleRun(benchmark::State& state)
{
    netsim::Scenario sc;
    sc.n_devices = static_cast<int>(state.range(0));
    sc.sim_time_s = static_cast<double>(state.range(1));
    sc.scheme = state.range(2) == 0 ? mac::Scheme::BU : mac::Scheme::Baseline;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto r = netsim::run(sc, seed++);
        benchmark::DoNotOptimize(r.metrics.delivered_unique);
        state.counters["events"] = static_cast<double>(r.events_processed);
    }
}
BENCHMARK(BM_SingleRun)
    ->Args({100, 6000, 0})
    ->Args({500, 7200, 0})
    ->Args({500, 7200, 1})
    ->Unit(benchmark::kMillisecond);

void BM_EngineThroughput(benchmark::State& state)
{
    const auto n = state.range(0);
    for (auto _ : state) {
        std::int64_t handled = 0;
        simcore::Engine engine([&](const simcore::Event&) { ++handled; });
        for (std::int64_t i = 0; i < n; ++i) {
            engine.schedule(simcore::SimTime::from_ns((i * 7919) % 1'000'003), 0, simcore::EventKind::TxSignal);
        }
        engine.run_until(simcore::SimTime::from_ns(2'000'000));
        benchmark::DoNotOptimize(handled);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EngineThroughput)->Arg(1 << 14)->Arg(1 << 18);

void BM_Airtime(benchmark::State& state)
{
    phy::LoRaParams p;
    int bytes = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phy::airtime_s(p, bytes));
        bytes = (bytes + 1) & 0xff;
    }
}
BENCHMARK(BM_Airtime);

} // namespace
BENCHMARK_MAIN();
