#pragma once

#include "leolora/netsim.hpp"

#include <chrono>
#include <string>
#include <vector>

namespace leolora::selftest {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    std::chrono::duration<double> elapsed{};
};

struct Report {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

struct Options {
    /// Scenario used by the protocol audits; defaults to the reference scenario.
    netsim::Scenario scenario;
    int audit_seeds = 10;
    double audit_sim_time_s = 7200.0;
    std::size_t slot_draws = 20000;
    /// Test hook: corrupts the beacon window length so the timing check must fail.
    bool perturb_beacon_timing = false;
};

Report run(const Options& options = {});

/// One-sample Kolmogorov-Smirnov statistic against U(0,1). Sorts `xs`.
double ks_uniform_statistic(std::vector<double>& xs);

/// Asymptotic critical value at the 1% level.
double ks_critical_1pct(std::size_t n);

} // namespace leolora::selftest
