#include "leolora/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace leolora::phy {

bool LoRaParams::effective_ldro() const
{
    if (low_data_rate_opt) {
        return *low_data_rate_opt;
    }
    return spreading_factor >= 11 && bandwidth_hz <= 125000.0;
}

void LoRaParams::validate() const
{
    if (spreading_factor < 7 || spreading_factor > 12) {
        throw std::invalid_argument("lora: spreading_factor must be in [7, 12]");
    }
    if (coding_rate_index < 1 || coding_rate_index > 4) {
        throw std::invalid_argument("lora: coding_rate_index must be in [1, 4]");
    }
    if (!(bandwidth_hz > 0.0)) {
        throw std::invalid_argument("lora: bandwidth_hz must be > 0");
    }
    if (preamble_symbols < 0) {
        throw std::invalid_argument("lora: preamble_symbols must be >= 0");
    }
}

SensitivityTable SensitivityTable::standard()
{
    SensitivityTable t;
    t.set(7, 125000.0, -124.0);
    t.set(8, 125000.0, -127.0);
    t.set(9, 125000.0, -130.0);
    t.set(10, 125000.0, -133.0);
    t.set(11, 125000.0, -135.0);
    t.set(12, 125000.0, -137.0);
    return t;
}

void SensitivityTable::set(int spreading_factor, double bandwidth_hz, double dbm)
{
    table_[{spreading_factor, std::lround(bandwidth_hz)}] = dbm;
}

double SensitivityTable::lookup(int spreading_factor, double bandwidth_hz) const
{
    auto it = table_.find({spreading_factor, std::lround(bandwidth_hz)});
    if (it == table_.end()) {
        throw std::out_of_range("no sensitivity entry for SF" + std::to_string(spreading_factor) + " at " +
                                std::to_string(std::lround(bandwidth_hz)) + " Hz");
    }
    return it->second;
}

double fspl_db(double distance_km, double freq_mhz)
{
    if (!(distance_km > 0.0)) {
        throw std::invalid_argument("fspl_db: distance must be > 0");
    }
    if (!(freq_mhz > 0.0)) {
        throw std::invalid_argument("fspl_db: frequency must be > 0");
    }
    return 32.45 + 20.0 * std::log10(distance_km) + 20.0 * std::log10(freq_mhz);
}

double rx_power_dbm(const LinkBudgetParams& link, double tx_power_dbm, double distance_km)
{
    return tx_power_dbm + link.tx_antenna_gain_dbi + link.rx_antenna_gain_dbi -
           fspl_db(distance_km, link.carrier_freq_mhz);
}

double airtime_s(const LoRaParams& params, int payload_bytes)
{
    params.validate();
    if (payload_bytes < 0 || payload_bytes > 255) {
        throw std::invalid_argument("airtime_s: payload_bytes must be in [0, 255]");
    }
    const int sf = params.spreading_factor;
    const double t_sym = std::ldexp(1.0, sf) / params.bandwidth_hz;
    const double t_preamble = (params.preamble_symbols + 4.25) * t_sym;

    const int de = params.effective_ldro() ? 1 : 0;
    const int ih = params.explicit_header ? 0 : 1;
    const int crc = params.crc ? 1 : 0;
    const int numerator = 8 * payload_bytes - 4 * sf + 28 + 16 * crc - 20 * ih;
    const int denominator = 4 * (sf - 2 * de);
    // Integer ceiling; numerator may be negative.
    const int blocks = numerator > 0 ? (numerator + denominator - 1) / denominator : 0;
    const int payload_symbols = 8 + blocks * (params.coding_rate_index + 4);
    return t_preamble + payload_symbols * t_sym;
}

Duration airtime(const LoRaParams& params, int payload_bytes)
{
    return Duration::from_seconds(airtime_s(params, payload_bytes));
}

std::string_view to_string(RxOutcome outcome)
{
    switch (outcome) {
    case RxOutcome::Received: return "Received";
    case RxOutcome::BelowSensitivity: return "BelowSensitivity";
    case RxOutcome::Collided: return "Collided";
    }
    return "Unknown";
}

std::vector<ReceptionRecord> resolve_receptions(int gateway_id, std::span<const ArrivingFrame> frames,
                                                double sensitivity_dbm, double capture_threshold_db)
{
    // Sweep in start order; an interferer of frame i must start before i ends.
    std::vector<std::size_t> order(frames.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return frames[a].attempt.start < frames[b].attempt.start;
    });

    std::vector<ReceptionRecord> out(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const ArrivingFrame& f = frames[i];
        out[i] = ReceptionRecord{f.attempt.frame_id, gateway_id, f.rx_power_dbm, RxOutcome::Received};
        if (f.rx_power_dbm < sensitivity_dbm) {
            out[i].outcome = RxOutcome::BelowSensitivity;
        }
    }

    for (std::size_t a = 0; a < order.size(); ++a) {
        const std::size_t i = order[a];
        const auto end_i = frames[i].attempt.end();
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const std::size_t j = order[b];
            if (frames[j].attempt.start >= end_i) {
                break;
            }
            if (!frames[i].attempt.overlaps(frames[j].attempt)) {
                continue;
            }
            const double pi = frames[i].rx_power_dbm;
            const double pj = frames[j].rx_power_dbm;
            if (out[i].outcome == RxOutcome::Received && pi - pj < capture_threshold_db) {
                out[i].outcome = RxOutcome::Collided;
            }
            if (out[j].outcome == RxOutcome::Received && pj - pi < capture_threshold_db) {
                out[j].outcome = RxOutcome::Collided;
            }
        }
    }
    return out;
}

} // namespace leolora::phy
