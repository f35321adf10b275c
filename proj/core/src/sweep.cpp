#include "leolora/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

namespace leolora::sweep {

void SweepSpec::validate() const
{
    if (sizes.empty()) {
        throw netsim::ScenarioError("sizes", "must not be empty");
    }
    if (times_s.empty()) {
        throw netsim::ScenarioError("times_s", "must not be empty");
    }
    if (schemes.empty()) {
        throw netsim::ScenarioError("schemes", "must not be empty");
    }
    if (repetitions < 1) {
        throw netsim::ScenarioError("repetitions", "must be >= 1");
    }
}

std::uint64_t derive_seed(std::uint64_t base_seed, mac::Scheme scheme, int n_devices, double sim_time_s, int rep)
{
    std::uint64_t h = simcore::hash_combine(base_seed, simcore::hash_tag(mac::to_string(scheme)));
    h = simcore::hash_combine(h, static_cast<std::uint64_t>(n_devices));
    h = simcore::hash_combine(h, static_cast<std::uint64_t>(simcore::SimTime::from_seconds(sim_time_s).ns()));
    return simcore::hash_combine(h, static_cast<std::uint64_t>(rep));
}

bool SweepResult::any_failed() const
{
    return std::any_of(cells.begin(), cells.end(), [](const SweepCell& c) {
        return std::any_of(c.runs.begin(), c.runs.end(), [](const SweepRun& r) { return !r.result; });
    });
}

SweepResult run_sweep(const netsim::Scenario& base, const SweepSpec& spec, int parallelism)
{
    spec.validate();
    if (parallelism < 1) {
        throw std::invalid_argument("run_sweep: parallelism must be >= 1");
    }

    SweepResult out;
    std::vector<SweepRun*> tasks;
    for (mac::Scheme scheme : spec.schemes) {
        for (int n : spec.sizes) {
            for (double t : spec.times_s) {
                SweepCell cell{CellKey{scheme, n, t}, {}, std::nullopt};
                for (int rep = 0; rep < spec.repetitions; ++rep) {
                    cell.runs.push_back(SweepRun{cell.cell, rep, derive_seed(spec.base_seed, scheme, n, t, rep), {}, {}});
                }
                out.cells.push_back(std::move(cell));
            }
        }
    }
    for (auto& cell : out.cells) {
        for (auto& run : cell.runs) {
            tasks.push_back(&run);
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            SweepRun& task = *tasks[i];
            netsim::Scenario s = base;
            s.scheme = task.cell.scheme;
            s.n_devices = task.cell.n_devices;
            s.sim_time_s = task.cell.sim_time_s;
            try {
                task.result = netsim::run(s, task.seed);
            } catch (const std::exception& e) {
                task.error = e.what();
            }
        }
    };

    const int threads = std::clamp(parallelism, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
    {
        std::vector<std::jthread> pool;
        for (int i = 1; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        worker();
    }

    for (auto& cell : out.cells) {
        std::vector<netsim::RunResult> ok;
        for (const auto& r : cell.runs) {
            if (r.result) {
                ok.push_back(*r.result);
            }
        }
        if (!ok.empty()) {
            cell.aggregate = netsim::aggregate(ok);
        }
    }
    return out;
}

} // namespace leolora::sweep
