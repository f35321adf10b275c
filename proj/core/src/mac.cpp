#include "leolora/mac.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace leolora::mac {

namespace {
constexpr std::uint64_t kPingOffsetKey = 0x4c6f526142656163ULL;
}

std::string_view to_string(Scheme scheme)
{
    return scheme == Scheme::BU ? "BU" : "Baseline";
}

Scheme parse_scheme(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "bu") {
        return Scheme::BU;
    }
    if (lower == "baseline") {
        return Scheme::Baseline;
    }
    throw std::invalid_argument("unknown scheme '" + std::string(text) + "' (expected BU or Baseline)");
}

Duration compute_ping_offset(SimTime beacon_time, std::uint32_t dev_addr, int ping_period_slots, Duration ping_slot)
{
    if (ping_period_slots < 1) {
        throw std::invalid_argument("compute_ping_offset: ping_period_slots must be >= 1");
    }
    const std::uint64_t h = simcore::hash_combine(simcore::mix64(static_cast<std::uint64_t>(beacon_time.ns()) ^ kPingOffsetKey),
                                                  dev_addr);
    // Multiply-shift reduction of the high 32 bits onto [0, slots).
    const std::uint64_t slot = ((h >> 32) * static_cast<std::uint64_t>(ping_period_slots)) >> 32;
    return ping_slot * static_cast<std::int64_t>(slot);
}

std::optional<SimTime> tx_slot_from_draw(SimTime now, Duration ping_offset, SimTime window_end, Duration airtime,
                                         double draw_s)
{
    if (!(now < window_end)) {
        throw std::logic_error("tx slot requested outside a beacon window");
    }
    const SimTime candidate = now + ping_offset + Duration::from_seconds(draw_s);
    if (candidate + airtime > window_end) {
        return std::nullopt;
    }
    return candidate;
}

std::optional<SimTime> schedule_tx_slot(SimTime now, Duration ping_offset, SimTime window_end, Duration airtime,
                                        simcore::RngStream& stream)
{
    if (!(now < window_end)) {
        throw std::logic_error("tx slot requested outside a beacon window");
    }
    const double left = (window_end - now).seconds();
    return tx_slot_from_draw(now, ping_offset, window_end, airtime, stream.uniform(0.0, left));
}

Duration TrafficModel::first_arrival(simcore::RngStream& stream) const
{
    return Duration::from_seconds(stream.uniform(0.0, first_max_s));
}

Duration TrafficModel::next_gap(simcore::RngStream& stream) const
{
    return Duration::from_seconds(stream.uniform(min_gap_s, max_gap_s));
}

DeviceMac::DeviceMac(simcore::EntityId entity, DeviceConfig config, simcore::RngStream txslot_stream)
    : entity_(entity), config_(std::move(config)), txslot_stream_(std::move(txslot_stream)),
      airtime_(phy::airtime(config_.lora, config_.payload_bytes))
{
    if (!config_.timing.consistent()) {
        throw std::invalid_argument("beacon timing: reserved + window + guard must equal the period");
    }
}

UplinkPacket DeviceMac::make_packet(SimTime t)
{
    return UplinkPacket{config_.payload_bytes, t, frame_counter_++};
}

void DeviceMac::cancel_signal(simcore::Engine& engine)
{
    if (next_signal_) {
        engine.cancel(*next_signal_);
    }
    next_signal_.reset();
    next_signal_time_.reset();
}

void DeviceMac::arm_signal(simcore::Engine& engine, SimTime at)
{
    next_signal_ = engine.schedule(at, entity_, simcore::EventKind::TxSignal);
    next_signal_time_ = at;
}

void DeviceMac::enqueue(const UplinkPacket& pkt)
{
    queue_.push_back(pkt);
    max_queue_depth_ = std::max(max_queue_depth_, queue_.size());
}

phy::TransmissionAttempt DeviceMac::transmit(SimTime t)
{
    const UplinkPacket pkt = queue_.front();
    queue_.pop_front();
    phy::TransmissionAttempt a;
    a.frame_id = (static_cast<std::uint64_t>(entity_) << 32) | pkt.sequence_number;
    a.device_id = entity_;
    a.sequence_number = pkt.sequence_number;
    a.start = t;
    a.airtime = phy::airtime(config_.lora, pkt.payload_bytes);
    a.tx_power_dbm = config_.tx_power_dbm;
    a.payload_bytes = pkt.payload_bytes;
    busy_until_ = a.end();
    return a;
}

void DeviceMac::on_beacon_outcome(simcore::Engine& engine, SimTime t, bool received)
{
    const BeaconTiming& timing = config_.timing;
    const auto k = timing.index_at(t);
    // Baseline devices keep listening but their pending signals are packet deferrals, not slots.
    if (config_.scheme == Scheme::BU) {
        cancel_signal(engine);
    }
    beacon_rcvd_ = received;
    if (!received) {
        window_end_.reset();
        return;
    }
    window_end_ = timing.window_end(k);
    ping_offset_ = compute_ping_offset(timing.epoch(k), config_.dev_addr, config_.ping_period_slots, timing.ping_slot);
    if (config_.scheme != Scheme::BU || !(t < *window_end_)) {
        return;
    }
    if (auto slot = schedule_tx_slot(t, ping_offset_, *window_end_, airtime_, txslot_stream_)) {
        arm_signal(engine, *slot);
    }
}

std::optional<phy::TransmissionAttempt> DeviceMac::on_tx_signal(simcore::Engine& engine, SimTime t)
{
    next_signal_.reset();
    next_signal_time_.reset();

    if (config_.scheme == Scheme::Baseline) {
        // Deferred baseline packet (generated during the beacon listen interval or while busy).
        if (queue_.empty()) {
            return std::nullopt;
        }
        const SimTime listen_end = config_.timing.window_start(config_.timing.index_at(t));
        const SimTime ready = std::max(t < listen_end ? listen_end : t, busy_until_);
        if (ready > t) {
            arm_signal(engine, ready);
            return std::nullopt;
        }
        auto attempt = transmit(t);
        if (!queue_.empty()) {
            arm_signal(engine, busy_until_);
        }
        return attempt;
    }

    // Following signal first; only while the received window is still open.
    if (beacon_rcvd_ && window_end_ && t < *window_end_) {
        if (auto slot = schedule_tx_slot(t, ping_offset_, *window_end_, airtime_, txslot_stream_)) {
            arm_signal(engine, *slot);
        }
    }
    if (queue_.empty() || !beacon_rcvd_ || t < busy_until_) {
        return std::nullopt;
    }
    return transmit(t);
}

std::optional<phy::TransmissionAttempt> DeviceMac::on_app_packet(simcore::Engine& engine, SimTime t,
                                                                 const UplinkPacket& pkt)
{
    enqueue(pkt);
    if (config_.scheme == Scheme::BU) {
        return std::nullopt;
    }
    const BeaconTiming& timing = config_.timing;
    const bool listening = timing.in_reserved(t);
    if (!listening && t >= busy_until_ && queue_.size() == 1) {
        return transmit(t);
    }
    if (!next_signal_) {
        const SimTime listen_end = timing.window_start(timing.index_at(t));
        arm_signal(engine, std::max(listening ? listen_end : t, busy_until_));
    }
    return std::nullopt;
}

} // namespace leolora::mac
