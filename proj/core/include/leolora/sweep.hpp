#pragma once

#include "leolora/mac.hpp"
#include "leolora/netsim.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace leolora::sweep {

struct SweepSpec {
    std::vector<int> sizes{100, 200, 300, 400, 500};
    std::vector<double> times_s{1200, 2400, 3600, 4800, 6000, 7200};
    std::vector<mac::Scheme> schemes{mac::Scheme::BU, mac::Scheme::Baseline};
    int repetitions = 10;
    std::uint64_t base_seed = 1;

    /// Throws netsim::ScenarioError naming the offending field.
    void validate() const;
};

/// Stable per-run seed; independent of how many repetitions are requested.
std::uint64_t derive_seed(std::uint64_t base_seed, mac::Scheme scheme, int n_devices, double sim_time_s, int rep);

struct CellKey {
    mac::Scheme scheme = mac::Scheme::BU;
    int n_devices = 0;
    double sim_time_s = 0.0;
};

struct SweepRun {
    CellKey cell;
    int rep_index = 0;
    std::uint64_t seed = 0;
    std::optional<netsim::RunResult> result;
    std::string error; // non-empty iff result is empty
};

struct SweepCell {
    CellKey cell;
    std::vector<SweepRun> runs;
    std::optional<netsim::Aggregate> aggregate; // over successful runs
};

struct SweepResult {
    /// Ordered by (scheme, size, time) in SweepSpec order, reps ascending.
    std::vector<SweepCell> cells;
    bool any_failed() const;
};

/// Runs the full cross-product of `spec` over `base`, using up to
/// `parallelism` worker threads. Output is identical for any parallelism.
SweepResult run_sweep(const netsim::Scenario& base, const SweepSpec& spec, int parallelism);

} // namespace leolora::sweep
