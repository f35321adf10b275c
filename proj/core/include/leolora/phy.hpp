#pragma once

#include "leolora/simcore/time.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace leolora::phy {

using simcore::Duration;
using simcore::SimTime;

struct LoRaParams {
    int spreading_factor = 12;
    double bandwidth_hz = 125000.0;
    /// Coding rate 4/(4 + index).
    int coding_rate_index = 4;
    int preamble_symbols = 8;
    bool explicit_header = true;
    bool crc = true;
    /// Unset means automatic: on for SF11/SF12 at 125 kHz or narrower.
    std::optional<bool> low_data_rate_opt;

    bool effective_ldro() const;
    void validate() const;
};

class SensitivityTable {
public:
    /// Published SX127x figures at 125 kHz.
    static SensitivityTable standard();

    void set(int spreading_factor, double bandwidth_hz, double dbm);
    /// Throws std::out_of_range when no entry exists.
    double lookup(int spreading_factor, double bandwidth_hz) const;

    const std::map<std::pair<int, long>, double>& entries() const { return table_; }

private:
    std::map<std::pair<int, long>, double> table_;
};

struct LinkBudgetParams {
    double tx_power_dbm = 14.0;
    double beacon_tx_power_dbm = 14.0;
    double tx_antenna_gain_dbi = 0.0;
    double rx_antenna_gain_dbi = 0.0;
    double carrier_freq_mhz = 868.0;
    SensitivityTable sensitivity = SensitivityTable::standard();
};

/// Free-space path loss, distance in km and frequency in MHz.
double fspl_db(double distance_km, double freq_mhz);

double rx_power_dbm(const LinkBudgetParams& link, double tx_power_dbm, double distance_km);

/// LoRa time-on-air in seconds.
double airtime_s(const LoRaParams& params, int payload_bytes);

/// Time-on-air rounded to the engine's nanosecond grid.
Duration airtime(const LoRaParams& params, int payload_bytes);

struct TransmissionAttempt {
    std::uint64_t frame_id = 0;
    std::uint32_t device_id = 0;
    std::uint32_t sequence_number = 0;
    SimTime start;
    Duration airtime;
    double tx_power_dbm = 14.0;
    int payload_bytes = 20;

    SimTime end() const { return start + airtime; }
    bool overlaps(const TransmissionAttempt& other) const
    {
        return start < other.end() && other.start < end();
    }
};

enum class RxOutcome : std::uint8_t { Received, BelowSensitivity, Collided };

std::string_view to_string(RxOutcome outcome);

struct ReceptionRecord {
    std::uint64_t frame_id = 0;
    int gateway_id = 0;
    double rx_power_dbm = 0.0;
    RxOutcome outcome = RxOutcome::Received;
};

struct ArrivingFrame {
    TransmissionAttempt attempt;
    double rx_power_dbm = 0.0;
};

/// Per-gateway reception with pairwise capture.
///
/// A frame below sensitivity is lost outright. Otherwise it survives only if
/// it is at least capture_threshold_db stronger than every frame it overlaps,
/// regardless of whether those interferers are themselves decodable.
std::vector<ReceptionRecord> resolve_receptions(int gateway_id, std::span<const ArrivingFrame> frames,
                                                double sensitivity_dbm, double capture_threshold_db = 6.0);

} // namespace leolora::phy
