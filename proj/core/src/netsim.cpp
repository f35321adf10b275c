#include "leolora/netsim.hpp"

#include "leolora/simcore/engine.hpp"
#include "leolora/simcore/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace leolora::netsim {

using simcore::Duration;
using simcore::EntityId;
using simcore::Event;
using simcore::EventKind;

namespace {
constexpr EntityId kNetworkEntity = std::numeric_limits<EntityId>::max();
}

void Scenario::validate() const
{
    if (n_devices < 1) {
        throw ScenarioError("n_devices", "must be >= 1");
    }
    if (!timing.consistent()) {
        throw ScenarioError("beacon timing", "reserved + window + guard must equal the period");
    }
    if (!(sim_time_s >= timing.period.seconds())) {
        throw ScenarioError("sim_time_s", "must cover at least one beacon period");
    }
    if (!(region_radius_km > 0.0) || region_radius_km > 0.5 * std::numbers::pi * orbit::kEarthRadiusKm) {
        throw ScenarioError("radius_km", "must be in (0, hemisphere]");
    }
    if (region_center.latitude_deg < -90.0 || region_center.latitude_deg > 90.0) {
        throw ScenarioError("center_lat_deg", "must be in [-90, 90]");
    }
    if (region_center.longitude_deg < -180.0 || region_center.longitude_deg >= 180.0) {
        throw ScenarioError("center_lon_deg", "must be in [-180, 180)");
    }
    if (payload_bytes < 0 || payload_bytes > 255) {
        throw ScenarioError("payload_bytes", "must be in [0, 255]");
    }
    if (ping_period_slots < 1) {
        throw ScenarioError("ping_period_slots", "must be >= 1");
    }
    if (repetitions < 1) {
        throw ScenarioError("repetitions", "must be >= 1");
    }
    if (!(traffic.min_gap_s > 0.0) || traffic.min_gap_s > traffic.max_gap_s) {
        throw ScenarioError("send_interval_s", "needs 0 < min <= max");
    }
    if (!(traffic.first_max_s >= 0.0)) {
        throw ScenarioError("first_packet_max_s", "must be >= 0");
    }
    try {
        lora.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError("lora", e.what());
    }
    try {
        (void)link.sensitivity.lookup(lora.spreading_factor, lora.bandwidth_hz);
    } catch (const std::out_of_range& e) {
        throw ScenarioError("sensitivity", e.what());
    }
    if (!(link.carrier_freq_mhz > 0.0)) {
        throw ScenarioError("carrier_freq_mhz", "must be > 0");
    }
    try {
        orbit::ConstellationConfig c = constellation;
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError("constellation", e.what());
    }
}

std::optional<double> delivery_ratio(const Metrics& m)
{
    if (m.generated == 0) {
        return std::nullopt;
    }
    return static_cast<double>(m.delivered_unique) / static_cast<double>(m.generated);
}

std::vector<bool> beacon_outcomes(const orbit::Constellation& constellation,
                                  std::span<const orbit::Vec3> device_ecef_units, SimTime t_k,
                                  const phy::LinkBudgetParams& link, double sensitivity_dbm,
                                  double min_elevation_deg)
{
    std::vector<orbit::Vec3> sats;
    sats.reserve(static_cast<std::size_t>(constellation.size()));
    for (int s = 0; s < constellation.size(); ++s) {
        sats.push_back(constellation.propagate(s, t_k).position_km);
    }
    std::vector<bool> out(device_ecef_units.size(), false);
    for (std::size_t d = 0; d < device_ecef_units.size(); ++d) {
        const orbit::Vec3 ground = orbit::ecef_to_inertial(orbit::kEarthRadiusKm * device_ecef_units[d], t_k);
        for (const auto& sat : sats) {
            if (!orbit::visible(sat, ground, min_elevation_deg)) {
                continue;
            }
            const double p = phy::rx_power_dbm(link, link.beacon_tx_power_dbm, orbit::slant_range_km(sat, ground));
            if (p >= sensitivity_dbm) {
                out[d] = true;
                break;
            }
        }
    }
    return out;
}

ReceptionMediator::ReceptionMediator(int gateway_count, double sensitivity_dbm, double capture_threshold_db)
    : gateways_(static_cast<std::size_t>(gateway_count)), sensitivity_dbm_(sensitivity_dbm),
      capture_threshold_db_(capture_threshold_db)
{
}

std::size_t ReceptionMediator::begin(const phy::TransmissionAttempt& attempt, std::vector<Sighting> sightings)
{
    const std::size_t index = frames_.size();
    for (const Sighting& s : sightings) {
        gateways_.at(static_cast<std::size_t>(s.gateway_id)).push_back(GatewayEntry{index, s.rx_power_dbm});
    }
    max_airtime_ = std::max(max_airtime_, attempt.airtime);
    frames_.push_back(InFlight{attempt, std::move(sightings), false});
    return index;
}

const Sighting* ReceptionMediator::sighting(std::size_t index, int gateway_id) const
{
    for (const Sighting& s : frames_.at(index).sightings) {
        if (s.gateway_id == gateway_id) {
            return &s;
        }
    }
    return nullptr;
}

FrameResolution ReceptionMediator::resolve(std::size_t index)
{
    InFlight& frame = frames_.at(index);
    if (frame.resolved) {
        throw std::logic_error("frame resolved twice");
    }
    frame.resolved = true;

    FrameResolution result;
    bool any_received = false;
    bool any_audible = false;
    std::vector<phy::ArrivingFrame> arriving;
    for (const Sighting& s : frame.sightings) {
        arriving.clear();
        arriving.push_back(phy::ArrivingFrame{frame.attempt, s.rx_power_dbm});
        for (const GatewayEntry& e : gateways_[static_cast<std::size_t>(s.gateway_id)]) {
            if (e.frame != index && frames_[e.frame].attempt.overlaps(frame.attempt)) {
                arriving.push_back(phy::ArrivingFrame{frames_[e.frame].attempt, e.rx_power_dbm});
            }
        }
        // The pairwise rule makes a frame's outcome depend only on its own overlappers.
        const auto records = phy::resolve_receptions(s.gateway_id, arriving, sensitivity_dbm_, capture_threshold_db_);
        const phy::ReceptionRecord& mine = records.front();
        any_received |= mine.outcome == phy::RxOutcome::Received;
        any_audible |= mine.outcome != phy::RxOutcome::BelowSensitivity;
        result.records.push_back(mine);
    }
    result.fate = any_received ? FrameFate::Delivered : any_audible ? FrameFate::Collided : FrameFate::NoCoverage;
    prune(frame.attempt.end());
    return result;
}

void ReceptionMediator::prune(SimTime now)
{
    // Any unresolved frame ends at or after `now`, so it starts no earlier than now - max_airtime.
    if (now.ns() < max_airtime_.ns()) {
        return;
    }
    const SimTime horizon = now - max_airtime_;
    for (auto& list : gateways_) {
        std::erase_if(list, [&](const GatewayEntry& e) {
            return frames_[e.frame].resolved && frames_[e.frame].attempt.end() <= horizon;
        });
    }
}

namespace {

class Simulation {
public:
    Simulation(const Scenario& scenario, std::uint64_t seed, const RunOptions& options)
        : scenario_(scenario), seed_(seed), constellation_(scenario.constellation),
          sensitivity_dbm_(scenario.link.sensitivity.lookup(scenario.lora.spreading_factor, scenario.lora.bandwidth_hz)),
          mediator_(constellation_.size(), sensitivity_dbm_, scenario.capture_threshold_db),
          engine_([this](const Event& ev) { dispatch(ev); })
    {
        engine_.set_trace(options.trace);
        if (options.collect_audit) {
            audit_.emplace();
        }
        simcore::RngStream site_stream(seed_, kNetworkEntity, "sites");
        const auto sites = orbit::sample_sites(scenario.region_center, scenario.region_radius_km,
                                               scenario.n_devices, site_stream);
        const auto n = static_cast<std::size_t>(scenario.n_devices);
        device_units_.reserve(n);
        devices_.reserve(n);
        traffic_streams_.reserve(n);
        generated_.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto id = static_cast<EntityId>(i);
            device_units_.push_back(orbit::ground_unit_ecef(sites[i]));
            simcore::RngStream addr_stream(seed_, id, "devaddr");
            mac::DeviceConfig cfg;
            cfg.dev_addr = static_cast<std::uint32_t>(addr_stream.next_u64());
            cfg.scheme = scenario.scheme;
            cfg.ping_period_slots = scenario.ping_period_slots;
            cfg.timing = scenario.timing;
            cfg.lora = scenario.lora;
            cfg.payload_bytes = scenario.payload_bytes;
            cfg.tx_power_dbm = scenario.link.tx_power_dbm;
            devices_.emplace_back(id, cfg, simcore::RngStream(seed_, id, "txslot"));
            traffic_streams_.emplace_back(seed_, id, "traffic");
        }
    }

    RunResult execute()
    {
        const SimTime t_end = SimTime::from_seconds(scenario_.sim_time_s);
        engine_.schedule(scenario_.timing.window_start(0), kNetworkEntity, EventKind::BeaconEpoch);
        for (std::size_t i = 0; i < devices_.size(); ++i) {
            const SimTime first = SimTime::zero() + scenario_.traffic.first_arrival(traffic_streams_[i]);
            engine_.schedule(first, static_cast<EntityId>(i), EventKind::AppPacket);
        }
        std::uint64_t processed = engine_.run_until(t_end);

        // Let frames already on air finish; nothing new starts after t_end.
        draining_ = true;
        processed += engine_.run_until(t_end + mac_airtime_bound());

        RunResult result;
        result.seed = seed_;
        metrics_.device_max_queue_depth.reserve(devices_.size());
        for (const auto& dev : devices_) {
            metrics_.still_queued += dev.queue_depth();
            metrics_.device_max_queue_depth.push_back(dev.max_queue_depth());
            metrics_.max_queue_depth = std::max(metrics_.max_queue_depth, dev.max_queue_depth());
        }
        if (metrics_.transmitted != metrics_.delivered_unique + metrics_.collided_frames + metrics_.lost_no_coverage) {
            throw std::logic_error("accounting identity violated");
        }
        if (metrics_.generated != metrics_.transmitted + metrics_.still_queued) {
            throw std::logic_error("packet conservation violated");
        }
        result.metrics = metrics_;
        result.delivery_ratio = delivery_ratio(metrics_);
        result.events_processed = processed;
        if (audit_) {
            audit_->generated_per_device = generated_;
            for (const auto& dev : devices_) {
                audit_->queued_per_device.push_back(dev.queue_depth());
            }
            result.audit = std::move(audit_);
        }
        return result;
    }

private:
    Duration mac_airtime_bound() const
    {
        return phy::airtime(scenario_.lora, 255) + Duration::from_ns(1);
    }

    void dispatch(const Event& ev)
    {
        if (draining_ && ev.kind != EventKind::TxEnd && ev.kind != EventKind::RxResolve) {
            return;
        }
        switch (ev.kind) {
        case EventKind::BeaconEpoch: on_beacon(ev.fire_time); break;
        case EventKind::AppPacket: on_app_packet(ev.target, ev.fire_time); break;
        case EventKind::TxSignal:
            if (auto a = devices_[ev.target].on_tx_signal(engine_, ev.fire_time)) {
                start_transmission(*a);
            }
            break;
        case EventKind::TxEnd: break;
        case EventKind::RxResolve: on_resolve(ev.payload); break;
        }
    }

    void on_beacon(SimTime t)
    {
        const auto& timing = scenario_.timing;
        const auto k = timing.index_at(t);
        const auto outcomes = beacon_outcomes(constellation_, device_units_, timing.epoch(k), scenario_.link,
                                              sensitivity_dbm_, scenario_.min_elevation_deg);
        for (std::size_t i = 0; i < devices_.size(); ++i) {
            devices_[i].on_beacon_outcome(engine_, t, outcomes[i]);
            if (audit_) {
                audit_->beacons.push_back(BeaconRecord{static_cast<std::uint32_t>(i), k, outcomes[i]});
            }
        }
        engine_.schedule(timing.window_start(k + 1), kNetworkEntity, EventKind::BeaconEpoch);
    }

    void on_app_packet(EntityId dev, SimTime t)
    {
        auto& mac = devices_[dev];
        const auto pkt = mac.make_packet(t);
        ++metrics_.generated;
        ++generated_[dev];
        if (auto a = mac.on_app_packet(engine_, t, pkt)) {
            start_transmission(*a);
        }
        engine_.schedule(t + scenario_.traffic.next_gap(traffic_streams_[dev]), dev, EventKind::AppPacket);
    }

    void start_transmission(const phy::TransmissionAttempt& a)
    {
        ++metrics_.transmitted;
        const orbit::Vec3 ground =
            orbit::ecef_to_inertial(orbit::kEarthRadiusKm * device_units_[a.device_id], a.start);
        std::vector<Sighting> sightings;
        for (int s = 0; s < constellation_.size(); ++s) {
            const orbit::Vec3 sat = constellation_.propagate(s, a.start).position_km;
            const double elev = orbit::elevation_deg(sat, ground);
            if (elev < scenario_.min_elevation_deg) {
                continue;
            }
            const double p = phy::rx_power_dbm(scenario_.link, a.tx_power_dbm, orbit::slant_range_km(sat, ground));
            sightings.push_back(Sighting{s, p, elev});
        }
        const std::size_t index = mediator_.begin(a, std::move(sightings));
        attempts_.push_back(a);
        engine_.schedule(a.end(), a.device_id, EventKind::TxEnd);
        engine_.schedule(a.end(), a.device_id, EventKind::RxResolve, index);
    }

    void on_resolve(std::size_t index)
    {
        const FrameResolution r = mediator_.resolve(index);
        switch (r.fate) {
        case FrameFate::Delivered: ++metrics_.delivered_unique; break;
        case FrameFate::Collided: ++metrics_.collided_frames; break;
        case FrameFate::NoCoverage: ++metrics_.lost_no_coverage; break;
        }
        for (const auto& rec : r.records) {
            if (rec.outcome == phy::RxOutcome::Collided) {
                ++metrics_.collided_receptions;
            }
        }
        if (audit_) {
            const auto& a = attempts_[index];
            audit_->transmissions.push_back(TransmissionRecord{a.device_id, a.sequence_number, a.start, a.end(), r.fate});
            for (const auto& rec : r.records) {
                const Sighting* s = mediator_.sighting(index, rec.gateway_id);
                audit_->receptions.push_back(GatewayReception{rec.frame_id, rec.gateway_id, s->elevation_deg, rec.outcome});
            }
        }
    }

    const Scenario& scenario_;
    std::uint64_t seed_;
    orbit::Constellation constellation_;
    double sensitivity_dbm_;
    ReceptionMediator mediator_;
    simcore::Engine engine_;
    std::vector<orbit::Vec3> device_units_;
    std::vector<mac::DeviceMac> devices_;
    std::vector<simcore::RngStream> traffic_streams_;
    std::vector<std::uint64_t> generated_;
    std::vector<phy::TransmissionAttempt> attempts_;
    Metrics metrics_;
    std::optional<RunAudit> audit_;
    bool draining_ = false;
};

Stat summarize(const std::vector<double>& xs)
{
    Stat s;
    s.count = xs.size();
    if (xs.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

} // namespace

RunResult run(const Scenario& scenario, std::uint64_t seed, const RunOptions& options)
{
    scenario.validate();
    Simulation sim(scenario, seed, options);
    return sim.execute();
}

Aggregate aggregate(std::span<const RunResult> results)
{
    if (results.empty()) {
        throw std::invalid_argument("aggregate: no results");
    }
    auto collect = [&](auto field) {
        std::vector<double> xs;
        xs.reserve(results.size());
        for (const auto& r : results) {
            xs.push_back(static_cast<double>(field(r)));
        }
        return summarize(xs);
    };
    Aggregate a;
    a.generated = collect([](const RunResult& r) { return r.metrics.generated; });
    a.transmitted = collect([](const RunResult& r) { return r.metrics.transmitted; });
    a.delivered_unique = collect([](const RunResult& r) { return r.metrics.delivered_unique; });
    a.collided_frames = collect([](const RunResult& r) { return r.metrics.collided_frames; });
    a.collided_receptions = collect([](const RunResult& r) { return r.metrics.collided_receptions; });
    a.lost_no_coverage = collect([](const RunResult& r) { return r.metrics.lost_no_coverage; });
    a.max_queue_depth = collect([](const RunResult& r) { return r.metrics.max_queue_depth; });
    std::vector<double> ratios;
    for (const auto& r : results) {
        if (r.delivery_ratio) {
            ratios.push_back(*r.delivery_ratio);
        }
    }
    a.delivery_ratio = summarize(ratios);
    return a;
}

} // namespace leolora::netsim
