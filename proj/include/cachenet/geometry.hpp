#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cachenet {

constexpr double kPi = 3.14159265358979323846264338327950288;

struct Point {
    double x = 0.0;  // km
    double y = 0.0;  // km
};

double distance(Point a, Point b);

// Deployment region: a disc of radius `radius_km` (R_n) centered at the
// origin. Users and SBSs are homogeneous PPPs on the disc; a user may only
// communicate with SBSs within `comm_radius_km` (R).
struct RegionSpec {
    double radius_km = 0.0;          // R_n
    double user_density = 0.0;       // λ, points per km²
    double sbs_density_max = 0.0;    // λ_s_max, points per km²
    double comm_radius_km = 0.0;     // R

    double area_km2() const { return kPi * radius_km * radius_km; }
    void validate() const;  // throws std::invalid_argument
};

// Channel-inversion power control: transmit power ρ0 · r^α keeps the mean
// received power at ρ0 regardless of link distance.
struct ChannelParams {
    double pathloss_exponent = 0.0;  // α, must exceed 2
    double target_rx_power_w = 0.0;  // ρ0
    double noise_power_w = 0.0;      // σ²
    double sinr_threshold = 0.0;     // θ

    void validate() const;
};

// One PPP realization of user and SBS positions, fully determined by
// (RegionSpec, seed).
struct NetworkSnapshot {
    std::vector<Point> users;
    std::vector<Point> sbs;
    std::uint64_t seed = 0;
};

// Poisson(density · area) points, each uniform on the disc. Radius is drawn
// as R_n·sqrt(u) so the density is exactly uniform.
std::vector<Point> sample_ppp(double density, const RegionSpec& region, std::uint64_t seed);

NetworkSnapshot sample_snapshot(const RegionSpec& region, std::uint64_t seed);

// Independent Bernoulli thinning; the survivors of a PPP form a PPP of
// density keep_prob · λ.
std::vector<Point> bernoulli_thin(std::span<const Point> points, double keep_prob,
                                  std::uint64_t seed);

double transmit_power(double distance_km, const ChannelParams& params);

struct NearestSbs {
    std::size_t index;
    double distance_km;
};

// Closest SBS within max_radius_km, or nullopt when none is in range.
// Equidistant candidates resolve to the lowest index.
std::optional<NearestSbs> nearest_sbs(Point user, std::span<const Point> sbs,
                                      double max_radius_km);

}  // namespace cachenet
