#pragma once

#include "leolora/phy.hpp"
#include "leolora/simcore/engine.hpp"
#include "leolora/simcore/rng.hpp"
#include "leolora/simcore/time.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>

namespace leolora::mac {

using simcore::Duration;
using simcore::SimTime;

/// Class B beacon period layout. Epoch k starts the reserved interval at
/// k * period; the window follows it and the guard closes the period.
struct BeaconTiming {
    Duration period = Duration::from_ms(128'000);
    Duration reserved = Duration::from_ms(2'120);
    Duration guard = Duration::from_ms(3'000);
    Duration window = Duration::from_ms(122'880);
    Duration ping_slot = Duration::from_ms(30);

    bool consistent() const { return reserved + window + guard == period; }

    std::int64_t index_at(SimTime t) const { return t.ns() / period.ns(); }
    SimTime epoch(std::int64_t k) const { return SimTime::zero() + period * k; }
    SimTime window_start(std::int64_t k) const { return epoch(k) + reserved; }
    SimTime window_end(std::int64_t k) const { return window_start(k) + window; }

    bool in_reserved(SimTime t) const { return t < window_start(index_at(t)); }
    bool in_window(SimTime t) const
    {
        const auto k = index_at(t);
        return t >= window_start(k) && t < window_end(k);
    }
};

enum class Scheme : std::uint8_t { BU, Baseline };

std::string_view to_string(Scheme scheme);
/// Accepts "BU" and "Baseline" (case-insensitive); throws std::invalid_argument otherwise.
Scheme parse_scheme(std::string_view text);

struct UplinkPacket {
    int payload_bytes = 20;
    SimTime generated_at;
    std::uint32_t sequence_number = 0;
};

/// Pseudo-random ping offset for (beacon_time, dev_addr): an integer slot in
/// [0, ping_period_slots) scaled by the ping slot length.
Duration compute_ping_offset(SimTime beacon_time, std::uint32_t dev_addr, int ping_period_slots,
                             Duration ping_slot = Duration::from_ms(30));

/// TX slot = now + ping_offset + draw, where draw is in [0, window_end - now).
/// Returns nullopt (deferred to the next beacon) if the frame would end after window_end.
std::optional<SimTime> tx_slot_from_draw(SimTime now, Duration ping_offset, SimTime window_end, Duration airtime,
                                         double draw_s);

/// Draws the uniform term from `stream`. Throws std::logic_error unless now < window_end.
std::optional<SimTime> schedule_tx_slot(SimTime now, Duration ping_offset, SimTime window_end, Duration airtime,
                                        simcore::RngStream& stream);

/// Periodic application traffic: the first packet lands uniformly in
/// [0, first_max_s), later gaps are uniform in [min_gap_s, max_gap_s].
struct TrafficModel {
    double min_gap_s = 480.0;
    double max_gap_s = 720.0;
    double first_max_s = 720.0;

    Duration first_arrival(simcore::RngStream& stream) const;
    Duration next_gap(simcore::RngStream& stream) const;
};

struct DeviceConfig {
    std::uint32_t dev_addr = 0;
    Scheme scheme = Scheme::BU;
    int ping_period_slots = 128;
    BeaconTiming timing;
    phy::LoRaParams lora;
    int payload_bytes = 20;
    double tx_power_dbm = 14.0;
};

/// One end device's MAC: the beacon-gated uplink queue for BU devices and
/// transmit-on-generation for baseline devices.
///
/// TX signals are scheduled on the engine as EventKind::TxSignal targeting
/// `entity`; the owner routes them back to on_tx_signal.
class DeviceMac {
public:
    DeviceMac(simcore::EntityId entity, DeviceConfig config, simcore::RngStream txslot_stream);

    simcore::EntityId entity() const { return entity_; }
    const DeviceConfig& config() const { return config_; }

    /// Called at the end of the beacon-reserved interval of epoch k.
    void on_beacon_outcome(simcore::Engine& engine, SimTime t, bool received);

    std::optional<phy::TransmissionAttempt> on_tx_signal(simcore::Engine& engine, SimTime t);

    std::optional<phy::TransmissionAttempt> on_app_packet(simcore::Engine& engine, SimTime t,
                                                          const UplinkPacket& pkt);

    /// Builds the next packet generated at t with a fresh sequence number.
    UplinkPacket make_packet(SimTime t);

    bool beacon_received() const { return beacon_rcvd_; }
    Duration ping_offset() const { return ping_offset_; }
    std::optional<SimTime> next_tx_signal() const { return next_signal_time_; }
    std::size_t queue_depth() const { return queue_.size(); }
    std::size_t max_queue_depth() const { return max_queue_depth_; }
    const std::deque<UplinkPacket>& queue() const { return queue_; }
    std::uint32_t frame_counter() const { return frame_counter_; }
    /// Window end of the most recently received beacon.
    std::optional<SimTime> current_window_end() const { return window_end_; }

private:
    void cancel_signal(simcore::Engine& engine);
    void arm_signal(simcore::Engine& engine, SimTime at);
    phy::TransmissionAttempt transmit(SimTime t);
    void enqueue(const UplinkPacket& pkt);

    simcore::EntityId entity_;
    DeviceConfig config_;
    simcore::RngStream txslot_stream_;
    Duration airtime_;

    std::deque<UplinkPacket> queue_;
    std::size_t max_queue_depth_ = 0;
    bool beacon_rcvd_ = false;
    Duration ping_offset_;
    std::optional<SimTime> window_end_;
    std::optional<simcore::EventHandle> next_signal_;
    std::optional<SimTime> next_signal_time_;
    std::uint32_t frame_counter_ = 0;
    SimTime busy_until_;
};

} // namespace leolora::mac
