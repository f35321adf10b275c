#include "leolora/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace leolora::orbit {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_360(double deg)
{
    double r = std::fmod(deg, 360.0);
    return r < 0.0 ? r + 360.0 : r;
}

double wrap_180(double deg)
{
    double r = wrap_360(deg + 180.0) - 180.0;
    return r;
}

} // namespace

double ConstellationConfig::mean_motion_rad_s() const
{
    const double a = semi_major_axis_km();
    return std::sqrt(kEarthMuKm3PerS2 / (a * a * a));
}

double ConstellationConfig::period_s() const
{
    return 2.0 * std::numbers::pi / mean_motion_rad_s();
}

void ConstellationConfig::validate()
{
    if (planes < 1 || sats_per_plane < 1) {
        throw std::invalid_argument("constellation: planes and sats_per_plane must be >= 1");
    }
    if (!(altitude_km > 0.0)) {
        throw std::invalid_argument("constellation: altitude_km must be > 0");
    }
    if (!(inclination_deg >= 0.0 && inclination_deg < 180.0)) {
        throw std::invalid_argument("constellation: inclination_deg must be in [0, 180)");
    }
    if (static_cast<int>(raan_deg.size()) != planes) {
        throw std::invalid_argument("constellation: raan_deg needs one entry per plane (" +
                                    std::to_string(planes) + ")");
    }
    if (!in_plane_phase_deg.empty() && static_cast<int>(in_plane_phase_deg.size()) != total()) {
        throw std::invalid_argument("constellation: in_plane_phase_deg needs one entry per satellite (" +
                                    std::to_string(total()) + ")");
    }
    for (double& r : raan_deg) {
        r = wrap_360(r);
    }
}

Constellation::Constellation(ConstellationConfig config) : config_(std::move(config))
{
    config_.validate();
    radius_km_ = config_.semi_major_axis_km();
    mean_motion_ = config_.mean_motion_rad_s();
    const double inc = config_.inclination_deg * kDeg;
    sats_.reserve(static_cast<std::size_t>(config_.total()));
    for (int plane = 0; plane < config_.planes; ++plane) {
        const double raan = config_.raan_deg[static_cast<std::size_t>(plane)] * kDeg;
        const Vec3 p{std::cos(raan), std::sin(raan), 0.0};
        const Vec3 q{-std::sin(raan) * std::cos(inc), std::cos(raan) * std::cos(inc), std::sin(inc)};
        for (int slot = 0; slot < config_.sats_per_plane; ++slot) {
            const int id = plane * config_.sats_per_plane + slot;
            double phase_deg = 0.0;
            if (config_.in_plane_phase_deg.empty()) {
                phase_deg = 360.0 * slot / config_.sats_per_plane + plane * config_.inter_plane_phase_deg;
            } else {
                phase_deg = config_.in_plane_phase_deg[static_cast<std::size_t>(id)];
            }
            sats_.push_back(Elements{p, q, phase_deg * kDeg});
        }
    }
}

SatelliteState Constellation::propagate(int sat_id, SimTime t) const
{
    if (sat_id < 0 || sat_id >= size()) {
        throw std::out_of_range("propagate: unknown sat_id " + std::to_string(sat_id));
    }
    const Elements& e = sats_[static_cast<std::size_t>(sat_id)];
    const double u = e.phase0_rad + mean_motion_ * t.seconds();
    return SatelliteState{sat_id, radius_km_ * (std::cos(u) * e.p + std::sin(u) * e.q), t};
}

SatelliteState propagate(const ConstellationConfig& config, int sat_id, SimTime t)
{
    return Constellation(config).propagate(sat_id, t);
}

Vec3 ground_unit_ecef(const GroundSite& site)
{
    const double lat = site.latitude_deg * kDeg;
    const double lon = site.longitude_deg * kDeg;
    return Vec3{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

Vec3 ecef_to_inertial(const Vec3& ecef, SimTime t)
{
    const double theta = kEarthRotationRadPerS * t.seconds();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return Vec3{c * ecef.x() - s * ecef.y(), s * ecef.x() + c * ecef.y(), ecef.z()};
}

Vec3 ground_position_inertial(const GroundSite& site, SimTime t)
{
    return ecef_to_inertial(kEarthRadiusKm * ground_unit_ecef(site), t);
}

double slant_range_km(const Vec3& sat_pos, const Vec3& ground_pos)
{
    return (sat_pos - ground_pos).norm();
}

double elevation_deg(const Vec3& sat_pos, const Vec3& ground_pos)
{
    const Vec3 los = sat_pos - ground_pos;
    const double range = los.norm();
    if (range == 0.0) {
        return 90.0;
    }
    const double s = los.dot(ground_pos.normalized()) / range;
    return std::asin(std::clamp(s, -1.0, 1.0)) / kDeg;
}

bool visible(const Vec3& sat_pos, const Vec3& ground_pos, double min_elevation_deg)
{
    return elevation_deg(sat_pos, ground_pos) >= min_elevation_deg;
}

double great_circle_km(const GroundSite& a, const GroundSite& b)
{
    const double c = std::clamp(ground_unit_ecef(a).dot(ground_unit_ecef(b)), -1.0, 1.0);
    return kEarthRadiusKm * std::acos(c);
}

std::vector<GroundSite> sample_sites(const GroundSite& center, double radius_km, int count,
                                     simcore::RngStream& stream)
{
    if (!(radius_km > 0.0)) {
        throw std::invalid_argument("sample_sites: radius_km must be > 0");
    }
    if (radius_km > 0.5 * std::numbers::pi * kEarthRadiusKm) {
        throw std::invalid_argument("sample_sites: radius exceeds a hemisphere");
    }
    if (count < 1) {
        throw std::invalid_argument("sample_sites: count must be >= 1");
    }
    const double max_angle = radius_km / kEarthRadiusKm;
    const double lat0 = center.latitude_deg * kDeg;
    const double lon0 = center.longitude_deg * kDeg;

    std::vector<GroundSite> sites;
    sites.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        // Area-uniform on the cap: cos(psi) is uniform on [cos(max), 1].
        const double cos_psi = 1.0 - stream.uniform01() * (1.0 - std::cos(max_angle));
        const double psi = std::acos(cos_psi);
        const double bearing = 2.0 * std::numbers::pi * stream.uniform01();
        const double lat = std::asin(std::sin(lat0) * cos_psi + std::cos(lat0) * std::sin(psi) * std::cos(bearing));
        const double lon = lon0 + std::atan2(std::sin(bearing) * std::sin(psi) * std::cos(lat0),
                                             cos_psi - std::sin(lat0) * std::sin(lat));
        sites.push_back(GroundSite{i, lat / kDeg, wrap_180(lon / kDeg)});
    }
    return sites;
}

} // namespace leolora::orbit
