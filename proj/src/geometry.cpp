#include "cachenet/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "cachenet/rng.hpp"

namespace cachenet {

double distance(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

void RegionSpec::validate() const {
    if (!(radius_km > 0.0)) throw std::invalid_argument("region: radius must be > 0");
    if (!(comm_radius_km > 0.0)) throw std::invalid_argument("region: comm radius must be > 0");
    if (comm_radius_km > radius_km)
        throw std::invalid_argument("region: comm radius must not exceed region radius");
    if (!(sbs_density_max > 0.0))
        throw std::invalid_argument("region: SBS density must be > 0");
    if (!(user_density > sbs_density_max))
        throw std::invalid_argument("region: user density must exceed SBS density");
}

void ChannelParams::validate() const {
    if (!(pathloss_exponent > 2.0))
        throw std::invalid_argument("channel: pathloss exponent must exceed 2");
    if (!(target_rx_power_w > 0.0))
        throw std::invalid_argument("channel: target rx power must be > 0");
    if (noise_power_w < 0.0)
        throw std::invalid_argument("channel: noise power must be >= 0");
    if (!(sinr_threshold > 0.0))
        throw std::invalid_argument("channel: SINR threshold must be > 0");
}

std::vector<Point> sample_ppp(double density, const RegionSpec& region, std::uint64_t seed) {
    if (!(density > 0.0)) throw std::invalid_argument("sample_ppp: density must be > 0");
    Rng rng(seed);
    const long count = rng.poisson(density * region.area_km2());
    std::vector<Point> points;
    points.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        const double r = region.radius_km * std::sqrt(rng.uniform());
        const double phi = 2.0 * kPi * rng.uniform();
        points.push_back({r * std::cos(phi), r * std::sin(phi)});
    }
    return points;
}

NetworkSnapshot sample_snapshot(const RegionSpec& region, std::uint64_t seed) {
    region.validate();
    NetworkSnapshot snap;
    snap.seed = seed;
    snap.users = sample_ppp(region.user_density, region, substream_seed(seed, 1));
    snap.sbs = sample_ppp(region.sbs_density_max, region, substream_seed(seed, 2));
    return snap;
}

std::vector<Point> bernoulli_thin(std::span<const Point> points, double keep_prob,
                                  std::uint64_t seed) {
    if (keep_prob < 0.0 || keep_prob > 1.0)
        throw std::invalid_argument("bernoulli_thin: keep probability must be in [0, 1]");
    Rng rng(seed);
    std::vector<Point> kept;
    kept.reserve(points.size());
    for (const Point& p : points) {
        if (rng.uniform() < keep_prob) kept.push_back(p);
    }
    return kept;
}

double transmit_power(double distance_km, const ChannelParams& params) {
    if (distance_km < 0.0) throw std::invalid_argument("transmit_power: negative distance");
    return params.target_rx_power_w * std::pow(distance_km, params.pathloss_exponent);
}

std::optional<NearestSbs> nearest_sbs(Point user, std::span<const Point> sbs,
                                      double max_radius_km) {
    std::optional<NearestSbs> best;
    for (std::size_t i = 0; i < sbs.size(); ++i) {
        const double d = distance(user, sbs[i]);
        if (d > max_radius_km) continue;
        if (!best || d < best->distance_km) best = NearestSbs{i, d};
    }
    return best;
}

}  // namespace cachenet
