#pragma once

#include "leolora/simcore/rng.hpp"
#include "leolora/simcore/time.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace leolora::orbit {

using Vec3 = Eigen::Vector3d;
using simcore::SimTime;

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthMuKm3PerS2 = 398600.4418;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;

struct ConstellationConfig {
    int planes = 4;
    int sats_per_plane = 4;
    double altitude_km = 600.0;
    double inclination_deg = 98.0;
    /// One entry per plane; normalized into [0, 360) by validate().
    std::vector<double> raan_deg{310.0, 330.0, 350.0, 370.0};
    /// Argument of latitude at epoch per satellite (plane-major). Empty means
    /// equal in-plane spacing shifted by plane_index * inter_plane_phase_deg.
    std::vector<double> in_plane_phase_deg;
    double inter_plane_phase_deg = 0.0;

    int total() const { return planes * sats_per_plane; }
    double semi_major_axis_km() const { return kEarthRadiusKm + altitude_km; }
    double mean_motion_rad_s() const;
    double period_s() const;

    /// Throws std::invalid_argument on inconsistent values; normalizes RAANs.
    void validate();
};

struct SatelliteState {
    int sat_id = 0;
    Vec3 position_km = Vec3::Zero(); // Earth-centred inertial
    SimTime time;
};

struct GroundSite {
    int site_id = 0;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
};

/// Circular Keplerian constellation with per-satellite elements precomputed.
class Constellation {
public:
    explicit Constellation(ConstellationConfig config);

    const ConstellationConfig& config() const { return config_; }
    int size() const { return static_cast<int>(sats_.size()); }

    /// Throws std::out_of_range for an unknown sat_id.
    SatelliteState propagate(int sat_id, SimTime t) const;

private:
    struct Elements {
        Vec3 p; // unit vector toward argument of latitude 0 (ascending node)
        Vec3 q; // unit vector 90 degrees ahead in the orbital plane
        double phase0_rad = 0.0;
    };
    ConstellationConfig config_;
    std::vector<Elements> sats_;
    double radius_km_ = 0.0;
    double mean_motion_ = 0.0;
};

SatelliteState propagate(const ConstellationConfig& config, int sat_id, SimTime t);

/// Earth-fixed site rotated into the inertial frame (sea level, spherical Earth).
Vec3 ground_position_inertial(const GroundSite& site, SimTime t);

/// Unit vector of the site in the Earth-fixed frame.
Vec3 ground_unit_ecef(const GroundSite& site);

/// Rotates an Earth-fixed vector into the inertial frame at time t.
Vec3 ecef_to_inertial(const Vec3& ecef, SimTime t);

double slant_range_km(const Vec3& sat_pos, const Vec3& ground_pos);

/// Elevation above the local horizontal at ground_pos; negative below the horizon.
double elevation_deg(const Vec3& sat_pos, const Vec3& ground_pos);

bool visible(const Vec3& sat_pos, const Vec3& ground_pos, double min_elevation_deg);

/// Great-circle distance between two sites on the spherical Earth.
double great_circle_km(const GroundSite& a, const GroundSite& b);

/// Sites uniform by area over the spherical cap of great-circle radius
/// radius_km around center. Throws when the cap exceeds a hemisphere.
std::vector<GroundSite> sample_sites(const GroundSite& center, double radius_km, int count,
                                     simcore::RngStream& stream);

} // namespace leolora::orbit
