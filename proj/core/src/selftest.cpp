#include "leolora/selftest.hpp"

#include "leolora/mac.hpp"
#include "leolora/orbit.hpp"
#include "leolora/phy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>

namespace leolora::selftest {

namespace {

using simcore::Duration;
using simcore::SimTime;

// Frozen reference values.
constexpr double kToaSf12 = 1.712128;
constexpr double kToaSf7 = 0.056576;
constexpr double kPeriod600 = 5792.0;
constexpr double kHorizon600 = 2829.0;
constexpr double kFspl600 = 146.78;

struct Outcome {
    bool passed;
    std::string detail;
};

Outcome check_airtime()
{
    phy::LoRaParams sf12;
    const double a = phy::airtime_s(sf12, 20);
    phy::LoRaParams sf7;
    sf7.spreading_factor = 7;
    sf7.coding_rate_index = 1;
    const double b = phy::airtime_s(sf7, 20);
    const bool ok = std::abs(a - kToaSf12) <= 1e-4 && std::abs(b - kToaSf7) <= 1e-4;
    return {ok, fmt::format("SF12 {:.6f} s, SF7 {:.6f} s", a, b)};
}

Outcome check_beacon_timing(const mac::BeaconTiming& t)
{
    const auto sum = t.reserved + t.window + t.guard;
    const bool ok = t.consistent() && sum.ns() == 128'000'000'000LL && t.period.ns() == 128'000'000'000LL;
    return {ok, fmt::format("{} + {} + {} = {} ns, period {} ns", t.reserved.ns(), t.window.ns(), t.guard.ns(),
                            sum.ns(), t.period.ns())};
}

Outcome check_geometry()
{
    orbit::ConstellationConfig cfg;
    const double period = cfg.period_s();
    const double re = orbit::kEarthRadiusKm;
    const double r = re + 600.0;
    const double horizon = std::sqrt(r * r - re * re);
    // Satellite placed straight above a site on the horizon-grazing line.
    const double fspl = phy::fspl_db(600.0, 868.0);

    // Cross-check the horizon distance against the propagated geometry:
    // a site whose zenith makes 90 degrees with the line to the satellite.
    const double psi = std::acos(re / r);
    const orbit::Vec3 sat{r, 0.0, 0.0};
    const orbit::Vec3 site{re * std::cos(psi), re * std::sin(psi), 0.0};
    const double slant = orbit::slant_range_km(sat, site);
    const double elev = orbit::elevation_deg(sat, site);

    const bool ok = std::abs(period - kPeriod600) <= 2.0 && std::abs(horizon - kHorizon600) <= 5.0 &&
                    std::abs(slant - horizon) <= 1e-6 && std::abs(elev) <= 1e-6 &&
                    std::abs(fspl - kFspl600) <= 0.05;
    return {ok, fmt::format("period {:.1f} s, horizon {:.1f} km, FSPL {:.3f} dB", period, slant, fspl)};
}

std::vector<netsim::RunResult> audit_runs(const Options& o, netsim::Scenario sc)
{
    sc.scheme = mac::Scheme::BU;
    sc.sim_time_s = o.audit_sim_time_s;
    std::vector<netsim::RunResult> out;
    netsim::RunOptions ro;
    ro.collect_audit = true;
    for (int i = 0; i < o.audit_seeds; ++i) {
        out.push_back(netsim::run(sc, 1000 + static_cast<std::uint64_t>(i), ro));
    }
    return out;
}

Outcome check_bu_safety(const netsim::Scenario& sc, const std::vector<netsim::RunResult>& runs)
{
    std::size_t frames = 0;
    std::size_t violations = 0;
    for (const auto& r : runs) {
        const auto& a = *r.audit;
        std::set<std::pair<std::uint32_t, std::int64_t>> heard;
        for (const auto& b : a.beacons) {
            if (b.received) {
                heard.emplace(b.device, b.epoch_index);
            }
        }
        for (const auto& tx : a.transmissions) {
            ++frames;
            const auto k = sc.timing.index_at(tx.start);
            if (!sc.timing.in_window(tx.start) || !heard.contains({tx.device, k})) {
                ++violations;
            }
        }
    }
    return {violations == 0, fmt::format("{} frames audited, {} outside a received window", frames, violations)};
}

Outcome check_bu_containment(const netsim::Scenario& sc, const std::vector<netsim::RunResult>& runs)
{
    std::size_t frames = 0;
    std::size_t violations = 0;
    for (const auto& r : runs) {
        for (const auto& tx : r.audit->transmissions) {
            ++frames;
            if (tx.end > sc.timing.window_end(sc.timing.index_at(tx.start))) {
                ++violations;
            }
        }
    }
    return {violations == 0, fmt::format("{} frames audited, {} overrun the window end", frames, violations)};
}

Outcome check_accounting(const Options& o, const std::vector<netsim::RunResult>& bu_runs)
{
    std::size_t identity_failures = 0;
    std::size_t fifo_failures = 0;

    auto audit_one = [&](const netsim::RunResult& r) {
        const auto& m = r.metrics;
        if (m.transmitted != m.delivered_unique + m.collided_frames + m.lost_no_coverage ||
            m.generated != m.transmitted + m.still_queued) {
            ++identity_failures;
        }
        std::map<std::uint32_t, std::uint32_t> last;
        for (const auto& tx : r.audit->transmissions) {
            auto it = last.find(tx.device);
            if (it != last.end() && tx.sequence_number != it->second + 1) {
                ++fifo_failures;
            }
            if (it == last.end() && tx.sequence_number != 0) {
                ++fifo_failures;
            }
            last[tx.device] = tx.sequence_number;
        }
    };
    for (const auto& r : bu_runs) {
        audit_one(r);
    }

    netsim::Scenario base = o.scenario;
    base.scheme = mac::Scheme::Baseline;
    base.sim_time_s = o.audit_sim_time_s;
    netsim::RunOptions ro;
    ro.collect_audit = true;
    const auto b1 = netsim::run(base, 77, ro);
    audit_one(b1);
    const auto b2 = netsim::run(base, 77, ro);

    netsim::Scenario bu = base;
    bu.scheme = mac::Scheme::BU;
    const auto u1 = netsim::run(bu, 77, ro);
    const auto u2 = netsim::run(bu, 77, ro);

    auto same = [](const netsim::RunResult& x, const netsim::RunResult& y) {
        if (!(x.metrics == y.metrics) || x.events_processed != y.events_processed) {
            return false;
        }
        const auto& a = x.audit->transmissions;
        const auto& b = y.audit->transmissions;
        return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const auto& p, const auto& q) {
            return p.device == q.device && p.sequence_number == q.sequence_number && p.start == q.start && p.fate == q.fate;
        });
    };
    const bool rerun_ok = same(b1, b2) && same(u1, u2);
    const bool ok = identity_failures == 0 && fifo_failures == 0 && rerun_ok;
    return {ok, fmt::format("{} runs, {} identity failures, {} FIFO violations, reruns {}", bu_runs.size() + 1,
                            identity_failures, fifo_failures, rerun_ok ? "identical" : "DIFFER")};
}

Outcome check_slot_distribution(const Options& o)
{
    const mac::BeaconTiming timing = o.scenario.timing;
    const Duration airtime = phy::airtime(o.scenario.lora, o.scenario.payload_bytes);
    simcore::RngStream pick(o.scenario.master_seed, 0, "selftest-now");
    simcore::RngStream draw(o.scenario.master_seed, 0, "selftest-slot");
    std::vector<double> u;
    u.reserve(o.slot_draws);
    std::size_t attempts = 0;
    while (u.size() < o.slot_draws && attempts < 100 * o.slot_draws) {
        ++attempts;
        const auto k = static_cast<std::int64_t>(attempts % 50);
        const SimTime ws = timing.window_start(k);
        const SimTime we = timing.window_end(k);
        const SimTime now = ws + Duration::from_seconds(pick.uniform(0.0, timing.window.seconds() - 10.0));
        const auto slot = mac::schedule_tx_slot(now, Duration{}, we, airtime, draw);
        if (!slot) {
            continue;
        }
        // Accepted slots are uniform over the span that still fits the frame.
        const double span = ((we - airtime) - now).seconds();
        u.push_back((*slot - now).seconds() / span);
    }
    const double d = ks_uniform_statistic(u);
    const double crit = ks_critical_1pct(u.size());
    return {u.size() >= o.slot_draws && d < crit, fmt::format("n = {}, D = {:.5f}, critical {:.5f}", u.size(), d, crit)};
}

} // namespace

bool Report::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

double ks_uniform_statistic(std::vector<double>& xs)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = std::clamp(xs[i], 0.0, 1.0);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - x, x - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical_1pct(std::size_t n)
{
    return 1.6276 / std::sqrt(static_cast<double>(n));
}

Report run(const Options& options)
{
    const Options& o = options;
    mac::BeaconTiming timing = o.scenario.timing;
    if (o.perturb_beacon_timing) {
        timing.window = timing.window + Duration::from_ms(1);
    }

    Report report;
    auto timed = [&](std::string name, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult c;
        c.name = std::move(name);
        try {
            auto out = fn();
            c.passed = out.passed;
            c.detail = std::move(out.detail);
        } catch (const std::exception& e) {
            c.passed = false;
            c.detail = std::string("exception: ") + e.what();
        }
        c.elapsed = std::chrono::steady_clock::now() - t0;
        report.checks.push_back(std::move(c));
    };

    timed("time-on-air", check_airtime);
    timed("beacon timing", [&] { return check_beacon_timing(timing); });
    timed("geometry", check_geometry);

    std::vector<netsim::RunResult> bu_runs;
    std::string audit_error;
    try {
        bu_runs = audit_runs(o, o.scenario);
    } catch (const std::exception& e) {
        audit_error = e.what();
    }
    auto needs_runs = [&](const std::function<Outcome()>& fn) {
        return [&, fn]() -> Outcome {
            if (!audit_error.empty()) {
                return {false, "audit runs failed: " + audit_error};
            }
            return fn();
        };
    };
    timed("BU safety", needs_runs([&] { return check_bu_safety(o.scenario, bu_runs); }));
    timed("BU containment", needs_runs([&] { return check_bu_containment(o.scenario, bu_runs); }));
    timed("accounting", needs_runs([&] { return check_accounting(o, bu_runs); }));
    timed("slot distribution", [&] { return check_slot_distribution(o); });
    return report;
}

} // namespace leolora::selftest
