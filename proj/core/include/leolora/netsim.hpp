#pragma once

#include "leolora/mac.hpp"
#include "leolora/orbit.hpp"
#include "leolora/phy.hpp"
#include "leolora/simcore/time.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leolora::netsim {

using simcore::SimTime;

/// Validation failure that names the offending scenario field.
class ScenarioError : public std::invalid_argument {
public:
    ScenarioError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct Scenario {
    orbit::ConstellationConfig constellation;
    orbit::GroundSite region_center{0, 0.0, 0.0};
    double region_radius_km = 2000.0;
    int n_devices = 100;
    double sim_time_s = 6000.0;
    mac::Scheme scheme = mac::Scheme::BU;
    phy::LoRaParams lora;
    phy::LinkBudgetParams link;
    int payload_bytes = 20;
    double capture_threshold_db = 6.0;
    double min_elevation_deg = 0.0;
    int ping_period_slots = 128;
    mac::TrafficModel traffic;
    mac::BeaconTiming timing;
    std::uint64_t master_seed = 1;
    int repetitions = 10;

    /// Throws ScenarioError naming the first invalid field.
    void validate() const;
};

struct Metrics {
    std::uint64_t generated = 0;
    std::uint64_t transmitted = 0;
    std::uint64_t delivered_unique = 0;
    std::uint64_t collided_frames = 0;
    std::uint64_t collided_receptions = 0;
    std::uint64_t lost_no_coverage = 0;
    std::uint64_t still_queued = 0;
    std::size_t max_queue_depth = 0;
    std::vector<std::size_t> device_max_queue_depth;

    bool operator==(const Metrics&) const = default;
};

/// delivered_unique / generated; nullopt when nothing was generated.
std::optional<double> delivery_ratio(const Metrics& m);

enum class FrameFate : std::uint8_t { Delivered, Collided, NoCoverage };

struct TransmissionRecord {
    std::uint32_t device = 0;
    std::uint32_t sequence_number = 0;
    SimTime start;
    SimTime end;
    FrameFate fate = FrameFate::NoCoverage;
};

struct BeaconRecord {
    std::uint32_t device = 0;
    std::int64_t epoch_index = 0;
    bool received = false;
};

struct GatewayReception {
    std::uint64_t frame_id = 0;
    int gateway_id = 0;
    double elevation_deg = 0.0;
    phy::RxOutcome outcome = phy::RxOutcome::Received;
};

/// Full per-run record used by invariant audits.
struct RunAudit {
    std::vector<BeaconRecord> beacons;
    std::vector<TransmissionRecord> transmissions;
    std::vector<GatewayReception> receptions;
    std::vector<std::uint64_t> generated_per_device;
    std::vector<std::uint64_t> queued_per_device;
};

struct RunResult {
    std::uint64_t seed = 0;
    Metrics metrics;
    std::optional<double> delivery_ratio;
    std::uint64_t events_processed = 0;
    std::optional<RunAudit> audit;
};

struct RunOptions {
    /// Line-delimited event trace; nullptr disables.
    std::ostream* trace = nullptr;
    bool collect_audit = false;
};

/// Deterministic function of (scenario, seed). Throws ScenarioError on invalid input.
RunResult run(const Scenario& scenario, std::uint64_t seed, const RunOptions& options = {});

/// Per-device beacon reception at epoch time t_k: true iff at least one
/// satellite above the elevation mask delivers the beacon above sensitivity.
/// Simultaneous beacons are synchronized copies and never collide.
std::vector<bool> beacon_outcomes(const orbit::Constellation& constellation,
                                  std::span<const orbit::Vec3> device_ecef_units, SimTime t_k,
                                  const phy::LinkBudgetParams& link, double sensitivity_dbm,
                                  double min_elevation_deg);

/// One gateway-side sighting of a frame, fixed at transmission start.
struct Sighting {
    int gateway_id = 0;
    double rx_power_dbm = 0.0;
    double elevation_deg = 0.0;
};

struct FrameResolution {
    FrameFate fate = FrameFate::NoCoverage;
    std::vector<phy::ReceptionRecord> records;
};

/// Tracks in-flight frames at every gateway and resolves each frame once,
/// at its end, against whatever overlapped it at the same gateway.
class ReceptionMediator {
public:
    ReceptionMediator(int gateway_count, double sensitivity_dbm, double capture_threshold_db);

    /// Returns the index passed back to resolve().
    std::size_t begin(const phy::TransmissionAttempt& attempt, std::vector<Sighting> sightings);

    /// Must be called at or after the frame's end; each index resolves once.
    FrameResolution resolve(std::size_t index);

    const Sighting* sighting(std::size_t index, int gateway_id) const;

private:
    struct InFlight {
        phy::TransmissionAttempt attempt;
        std::vector<Sighting> sightings;
        bool resolved = false;
    };
    struct GatewayEntry {
        std::size_t frame = 0;
        double rx_power_dbm = 0.0;
    };

    void prune(SimTime now);

    std::vector<InFlight> frames_;
    std::vector<std::vector<GatewayEntry>> gateways_;
    double sensitivity_dbm_;
    double capture_threshold_db_;
    simcore::Duration max_airtime_;
};

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

struct Aggregate {
    Stat generated;
    Stat transmitted;
    Stat delivered_unique;
    Stat collided_frames;
    Stat collided_receptions;
    Stat lost_no_coverage;
    Stat delivery_ratio; // over runs that generated traffic
    Stat max_queue_depth;
};

/// Mean and sample standard deviation per metric. Throws on an empty list.
Aggregate aggregate(std::span<const RunResult> results);

} // namespace leolora::netsim
