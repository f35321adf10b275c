#include "leolora/scenario_file.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <vector>

namespace leolora::scenario_file {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        auto item = trim(s.substr(0, comma));
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        s.remove_prefix(comma + 1);
    }
    return out;
}

struct ValueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double to_double(std::string_view s)
{
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ValueError("expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

template <typename Int>
Int to_int(std::string_view s)
{
    Int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ValueError("expected an integer, got '" + std::string(s) + "'");
    }
    return v;
}

bool to_bool(std::string_view s)
{
    std::string l(s);
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    if (l == "true" || l == "yes" || l == "on" || l == "1") {
        return true;
    }
    if (l == "false" || l == "no" || l == "off" || l == "0") {
        return false;
    }
    throw ValueError("expected a boolean, got '" + std::string(s) + "'");
}

std::vector<double> to_doubles(std::string_view s)
{
    std::vector<double> out;
    for (auto item : split_list(s)) {
        out.push_back(to_double(item));
    }
    return out;
}

using Setter = std::function<void(ScenarioDocument&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"constellation.planes", [](auto& d, auto v) { d.scenario.constellation.planes = to_int<int>(v); }},
        {"constellation.sats_per_plane", [](auto& d, auto v) { d.scenario.constellation.sats_per_plane = to_int<int>(v); }},
        {"constellation.altitude_km", [](auto& d, auto v) { d.scenario.constellation.altitude_km = to_double(v); }},
        {"constellation.inclination_deg", [](auto& d, auto v) { d.scenario.constellation.inclination_deg = to_double(v); }},
        {"constellation.raan_deg", [](auto& d, auto v) { d.scenario.constellation.raan_deg = to_doubles(v); }},
        {"constellation.in_plane_phase_deg", [](auto& d, auto v) { d.scenario.constellation.in_plane_phase_deg = to_doubles(v); }},
        {"constellation.inter_plane_phase_deg", [](auto& d, auto v) { d.scenario.constellation.inter_plane_phase_deg = to_double(v); }},

        {"region.center_lat_deg", [](auto& d, auto v) { d.scenario.region_center.latitude_deg = to_double(v); }},
        {"region.center_lon_deg", [](auto& d, auto v) { d.scenario.region_center.longitude_deg = to_double(v); }},
        {"region.radius_km", [](auto& d, auto v) { d.scenario.region_radius_km = to_double(v); }},

        {"network.n_devices", [](auto& d, auto v) { d.scenario.n_devices = to_int<int>(v); }},
        {"network.sim_time_s", [](auto& d, auto v) { d.scenario.sim_time_s = to_double(v); }},
        {"network.scheme", [](auto& d, auto v) {
             try {
                 d.scenario.scheme = mac::parse_scheme(v);
             } catch (const std::invalid_argument& e) {
                 throw ValueError(e.what());
             }
         }},
        {"network.payload_bytes", [](auto& d, auto v) { d.scenario.payload_bytes = to_int<int>(v); }},
        {"network.send_interval_s", [](auto& d, auto v) {
             const auto xs = to_doubles(v);
             if (xs.size() != 2) {
                 throw ValueError("expected 'min, max'");
             }
             d.scenario.traffic.min_gap_s = xs[0];
             d.scenario.traffic.max_gap_s = xs[1];
         }},
        {"network.first_packet_max_s", [](auto& d, auto v) { d.scenario.traffic.first_max_s = to_double(v); }},
        {"network.ping_period_slots", [](auto& d, auto v) { d.scenario.ping_period_slots = to_int<int>(v); }},

        {"lora.spreading_factor", [](auto& d, auto v) { d.scenario.lora.spreading_factor = to_int<int>(v); }},
        {"lora.bandwidth_hz", [](auto& d, auto v) { d.scenario.lora.bandwidth_hz = to_double(v); }},
        {"lora.coding_rate_index", [](auto& d, auto v) { d.scenario.lora.coding_rate_index = to_int<int>(v); }},
        {"lora.preamble_symbols", [](auto& d, auto v) { d.scenario.lora.preamble_symbols = to_int<int>(v); }},
        {"lora.explicit_header", [](auto& d, auto v) { d.scenario.lora.explicit_header = to_bool(v); }},
        {"lora.crc", [](auto& d, auto v) { d.scenario.lora.crc = to_bool(v); }},
        {"lora.low_data_rate_opt", [](auto& d, auto v) {
             if (trim(v) == "auto") {
                 d.scenario.lora.low_data_rate_opt.reset();
             } else {
                 d.scenario.lora.low_data_rate_opt = to_bool(v);
             }
         }},

        {"link.tx_power_dbm", [](auto& d, auto v) { d.scenario.link.tx_power_dbm = to_double(v); }},
        {"link.beacon_tx_power_dbm", [](auto& d, auto v) { d.scenario.link.beacon_tx_power_dbm = to_double(v); }},
        {"link.tx_antenna_gain_dbi", [](auto& d, auto v) { d.scenario.link.tx_antenna_gain_dbi = to_double(v); }},
        {"link.rx_antenna_gain_dbi", [](auto& d, auto v) { d.scenario.link.rx_antenna_gain_dbi = to_double(v); }},
        {"link.carrier_freq_mhz", [](auto& d, auto v) { d.scenario.link.carrier_freq_mhz = to_double(v); }},
        {"link.sensitivity_dbm", [](auto& d, auto v) {
             // SF7..SF12 at the configured bandwidth.
             const auto xs = to_doubles(v);
             if (xs.size() != 6) {
                 throw ValueError("expected six values for SF7..SF12");
             }
             for (int sf = 7; sf <= 12; ++sf) {
                 d.scenario.link.sensitivity.set(sf, d.scenario.lora.bandwidth_hz, xs[static_cast<std::size_t>(sf - 7)]);
             }
         }},

        {"channel.capture_threshold_db", [](auto& d, auto v) { d.scenario.capture_threshold_db = to_double(v); }},
        {"channel.min_elevation_deg", [](auto& d, auto v) { d.scenario.min_elevation_deg = to_double(v); }},

        {"run.seed", [](auto& d, auto v) { d.scenario.master_seed = to_int<std::uint64_t>(v); }},
        {"run.repetitions", [](auto& d, auto v) { d.scenario.repetitions = to_int<int>(v); }},

        {"sweep.sizes", [](auto& d, auto v) {
             d.sweep.sizes.clear();
             for (auto item : split_list(v)) {
                 d.sweep.sizes.push_back(to_int<int>(item));
             }
         }},
        {"sweep.times_s", [](auto& d, auto v) { d.sweep.times_s = to_doubles(v); }},
        {"sweep.schemes", [](auto& d, auto v) {
             d.sweep.schemes.clear();
             for (auto item : split_list(v)) {
                 try {
                     d.sweep.schemes.push_back(mac::parse_scheme(item));
                 } catch (const std::invalid_argument& e) {
                     throw ValueError(e.what());
                 }
             }
         }},
        {"sweep.repetitions", [](auto& d, auto v) { d.sweep.repetitions = to_int<int>(v); }},
        {"sweep.base_seed", [](auto& d, auto v) { d.sweep.base_seed = to_int<std::uint64_t>(v); }},
    };
    return table;
}

void assign(ScenarioDocument& doc, const std::string& key, std::string_view value, int line)
{
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) {
        throw ParseError(doc.source, line, key, "unknown key");
    }
    try {
        it->second(doc, trim(value));
    } catch (const ValueError& e) {
        throw ParseError(doc.source, line, key, e.what());
    }
    doc.key_lines[key] = line;
}

std::string num(double v)
{
    return fmt::format("{}", v);
}

std::string nums(const std::vector<double>& xs)
{
    return fmt::format("{}", fmt::join(xs, ", "));
}

} // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& key, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}: {}", source, line, key, message)
                                  : fmt::format("{}: {}: {}", source, key, message)),
      line_(line), key_(key)
{
}

ScenarioDocument parse(std::istream& in, std::string source)
{
    ScenarioDocument doc;
    doc.source = std::move(source);
    std::string section;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = raw;
        if (auto hash = text.find('#'); hash != std::string_view::npos) {
            text = text.substr(0, hash);
        }
        text = trim(text);
        if (text.empty()) {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw ParseError(doc.source, line, std::string(text), "unterminated section header");
            }
            section = std::string(trim(text.substr(1, text.size() - 2)));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(doc.source, line, std::string(text), "expected 'key = value'");
        }
        const std::string key = std::string(trim(text.substr(0, eq)));
        if (section.empty()) {
            throw ParseError(doc.source, line, key, "key outside of a [section]");
        }
        assign(doc, section + "." + key, text.substr(eq + 1), line);
    }
    return doc;
}

ScenarioDocument load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "file", "cannot open");
    }
    return parse(in, path.string());
}

void apply_override(ScenarioDocument& doc, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ParseError("--set", 0, std::string(assignment), "expected section.key=value");
    }
    const std::string key(trim(assignment.substr(0, eq)));
    const std::string saved = doc.source;
    doc.source = "--set";
    assign(doc, key, assignment.substr(eq + 1), 0);
    doc.source = saved;
    doc.key_lines.erase(key);
}

void validate(const ScenarioDocument& doc)
{
    auto rethrow = [&](const netsim::ScenarioError& e) {
        for (const auto& [key, line] : doc.key_lines) {
            if (key.substr(key.find('.') + 1) == e.field()) {
                throw netsim::ScenarioError(e.field(),
                                            fmt::format("{} (at {}:{})", std::string(e.what()).substr(e.field().size() + 2),
                                                        doc.source, line));
            }
        }
        throw e;
    };
    try {
        doc.scenario.validate();
        doc.sweep.validate();
    } catch (const netsim::ScenarioError& e) {
        rethrow(e);
    }
}

std::string format(const ScenarioDocument& doc)
{
    const auto& s = doc.scenario;
    const auto& c = s.constellation;
    std::ostringstream o;
    o << "[constellation]\n";
    o << "planes = " << c.planes << '\n';
    o << "sats_per_plane = " << c.sats_per_plane << '\n';
    o << "altitude_km = " << num(c.altitude_km) << '\n';
    o << "inclination_deg = " << num(c.inclination_deg) << '\n';
    o << "raan_deg = " << nums(c.raan_deg) << '\n';
    if (!c.in_plane_phase_deg.empty()) {
        o << "in_plane_phase_deg = " << nums(c.in_plane_phase_deg) << '\n';
    }
    o << "inter_plane_phase_deg = " << num(c.inter_plane_phase_deg) << '\n';

    o << "\n[region]\n";
    o << "center_lat_deg = " << num(s.region_center.latitude_deg) << '\n';
    o << "center_lon_deg = " << num(s.region_center.longitude_deg) << '\n';
    o << "radius_km = " << num(s.region_radius_km) << '\n';

    o << "\n[network]\n";
    o << "n_devices = " << s.n_devices << '\n';
    o << "sim_time_s = " << num(s.sim_time_s) << '\n';
    o << "scheme = " << mac::to_string(s.scheme) << '\n';
    o << "payload_bytes = " << s.payload_bytes << '\n';
    o << "send_interval_s = " << num(s.traffic.min_gap_s) << ", " << num(s.traffic.max_gap_s) << '\n';
    o << "first_packet_max_s = " << num(s.traffic.first_max_s) << '\n';
    o << "ping_period_slots = " << s.ping_period_slots << '\n';

    o << "\n[lora]\n";
    o << "spreading_factor = " << s.lora.spreading_factor << '\n';
    o << "bandwidth_hz = " << num(s.lora.bandwidth_hz) << '\n';
    o << "coding_rate_index = " << s.lora.coding_rate_index << '\n';
    o << "preamble_symbols = " << s.lora.preamble_symbols << '\n';
    o << "explicit_header = " << (s.lora.explicit_header ? "true" : "false") << '\n';
    o << "crc = " << (s.lora.crc ? "true" : "false") << '\n';
    o << "low_data_rate_opt = "
      << (s.lora.low_data_rate_opt ? (*s.lora.low_data_rate_opt ? "true" : "false") : "auto") << '\n';

    o << "\n[link]\n";
    o << "tx_power_dbm = " << num(s.link.tx_power_dbm) << '\n';
    o << "beacon_tx_power_dbm = " << num(s.link.beacon_tx_power_dbm) << '\n';
    o << "tx_antenna_gain_dbi = " << num(s.link.tx_antenna_gain_dbi) << '\n';
    o << "rx_antenna_gain_dbi = " << num(s.link.rx_antenna_gain_dbi) << '\n';
    o << "carrier_freq_mhz = " << num(s.link.carrier_freq_mhz) << '\n';
    std::vector<double> sens;
    for (int sf = 7; sf <= 12; ++sf) {
        try {
            sens.push_back(s.link.sensitivity.lookup(sf, s.lora.bandwidth_hz));
        } catch (const std::out_of_range&) {
            sens.clear();
            break;
        }
    }
    if (!sens.empty()) {
        o << "sensitivity_dbm = " << nums(sens) << '\n';
    }

    o << "\n[channel]\n";
    o << "capture_threshold_db = " << num(s.capture_threshold_db) << '\n';
    o << "min_elevation_deg = " << num(s.min_elevation_deg) << '\n';

    o << "\n[run]\n";
    o << "seed = " << s.master_seed << '\n';
    o << "repetitions = " << s.repetitions << '\n';

    const auto& w = doc.sweep;
    o << "\n[sweep]\n";
    o << "sizes = " << fmt::format("{}", fmt::join(w.sizes, ", ")) << '\n';
    o << "times_s = " << nums(w.times_s) << '\n';
    std::vector<std::string_view> names;
    for (auto sc : w.schemes) {
        names.push_back(mac::to_string(sc));
    }
    o << "schemes = " << fmt::format("{}", fmt::join(names, ", ")) << '\n';
    o << "repetitions = " << w.repetitions << '\n';
    o << "base_seed = " << w.base_seed << '\n';
    return o.str();
}

} // namespace leolora::scenario_file
