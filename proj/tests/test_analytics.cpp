#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cachenet/analytics.hpp"
#include "cachenet/special.hpp"

using namespace cachenet;

namespace {

RegionSpec region_10km2(double comm_radius = 0.5) {
    RegionSpec region;
    region.radius_km = std::sqrt(10.0 / kPi);
    region.user_density = 30.0;
    region.sbs_density_max = 2.5;
    region.comm_radius_km = comm_radius;
    return region;
}

ChannelParams default_channel(double alpha = 2.5, double theta = 0.1) {
    ChannelParams c;
    c.pathloss_exponent = alpha;
    c.target_rx_power_w = 0.12589254117941673;  // 21 dBm
    c.noise_power_w = 1e-13;
    c.sinr_threshold = theta;
    return c;
}

PowerParams default_power() { return {10.16, 10.0, 12.5e-5}; }

// two mirrored clusters over a two-file catalog; each caches its own file
ClusteredScenario mirror_scenario(double lambda_per_cluster, double comm_radius = 0.5) {
    ClusteredScenario s;
    s.region = region_10km2(comm_radius);
    s.channel = default_channel();
    s.power = default_power();
    s.profiles.resize(4);
    s.profiles[0].probs = {0.8, 0.2};
    s.profiles[1].probs = {0.8, 0.2};
    s.profiles[2].probs = {0.2, 0.8};
    s.profiles[3].probs = {0.2, 0.8};
    s.assignment = {0, 0, 1, 1};
    s.cache_sets.resize(2);
    s.cache_sets[0].files = {0};
    s.cache_sets[0].total_size_bits = 1.0;
    s.cache_sets[1].files = {1};
    s.cache_sets[1].total_size_bits = 1.0;
    s.densities.per_cluster = {lambda_per_cluster, lambda_per_cluster};
    return s;
}

ClusteredScenario single_cluster_scenario(double lambda_s, double cached = 0.7,
                                          double comm_radius = 0.5) {
    ClusteredScenario s;
    s.region = region_10km2(comm_radius);
    s.channel = default_channel();
    s.power = default_power();
    s.profiles.resize(3);
    for (auto& p : s.profiles) p.probs = {cached, 1.0 - cached};
    s.assignment = {0, 0, 0};
    s.cache_sets.resize(1);
    s.cache_sets[0].files = {0};
    s.cache_sets[0].total_size_bits = 1.0;
    s.densities.per_cluster = {lambda_s};
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("analytics");

TEST_CASE("single-cluster hit probability collapses to q(1 - e^{-lambda pi R^2})") {
    const double lambda_s = 1.0, q = 0.7, comm_r = 0.5;
    const ClusteredScenario s = single_cluster_scenario(lambda_s, q, comm_r);
    const HitProbability hit = hit_probability(s);
    const double expected = q * (1.0 - std::exp(-lambda_s * kPi * comm_r * comm_r));
    CHECK(hit.raw == doctest::Approx(expected).epsilon(1e-12));
    CHECK(hit.clamped == hit.raw);
}

TEST_CASE("zero densities give zero hit probability") {
    ClusteredScenario s = mirror_scenario(0.0);
    const HitProbability hit = hit_probability(s);
    CHECK(hit.raw == 0.0);
    CHECK(hit.clamped == 0.0);
}

TEST_CASE("raw hit probability is monotone in density and radius") {
    double prev = 0.0;
    for (double lambda : {0.2, 0.4, 0.8, 1.2}) {
        const double hit = hit_probability(mirror_scenario(lambda / 2.0)).raw;
        CHECK(hit >= prev);
        prev = hit;
    }
    prev = 0.0;
    for (double r : {0.2, 0.4, 0.6, 0.8}) {
        const double hit = hit_probability(mirror_scenario(0.5, r)).raw;
        CHECK(hit >= prev);
        prev = hit;
    }
}

TEST_CASE("mean nearest transmit power matches the alpha=2 closed form") {
    ChannelParams c = default_channel(2.0);
    const double lambda = 0.8, comm_r = 0.6;
    const double x = kPi * lambda * comm_r * comm_r;
    const double expected =
        c.target_rx_power_w * (1.0 - std::exp(-x) * (1.0 + x)) / (lambda * kPi);
    CHECK(mean_nearest_tx_power(lambda, c, comm_r) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mean nearest transmit power agrees with direct quadrature") {
    // Simpson integration of rho0 r^alpha · 2 pi lambda r e^{-lambda pi r^2}
    // over [0, R]: an independent route to the truncated mean
    const ChannelParams c = default_channel(2.7);
    for (double lambda : {0.3, 0.9, 1.7}) {
        for (double comm_r : {0.3, 0.6}) {
            const int n = 4000;  // even
            const double h = comm_r / n;
            double acc = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double r = i * h;
                const double f = c.target_rx_power_w *
                                 std::pow(r, c.pathloss_exponent) * 2.0 * kPi *
                                 lambda * r * std::exp(-lambda * kPi * r * r);
                acc += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
            }
            acc *= h / 3.0;
            CHECK(mean_nearest_tx_power(lambda, c, comm_r) ==
                  doctest::Approx(acc).epsilon(1e-8));
        }
    }
}

TEST_CASE("mean nearest transmit power vanishes in the dense limit and at zero") {
    const ChannelParams c = default_channel();
    CHECK(mean_nearest_tx_power(1e4, c, 0.5) < 1e-5);
    CHECK(mean_nearest_tx_power(0.0, c, 0.5) == 0.0);
    // The truncation at R silences sparse clusters whose nearest SBS falls
    // out of range, so the mean rises from zero before the dense-regime
    // decay takes over; monotone decrease holds once πλR² clears the peak.
    const double comm_r = 0.5;
    double prev = mean_nearest_tx_power(4.0 / (kPi * comm_r * comm_r), c, comm_r);
    for (double x : {5.0, 7.0, 10.0, 20.0, 50.0}) {
        const double lambda = x / (kPi * comm_r * comm_r);
        const double value = mean_nearest_tx_power(lambda, c, comm_r);
        CHECK(value < prev);
        prev = value;
    }
}

TEST_CASE("single-cluster total power reduces to the direct assembly") {
    const ClusteredScenario s = single_cluster_scenario(1.2, 0.65);
    const double n_sbs = 1.2 * s.region.area_km2();
    const double hit = hit_probability(s).clamped;
    const double expected =
        n_sbs * (s.power.harddisk_fetch_w * hit + s.power.backhaul_fetch_w * (1.0 - hit) +
                 s.power.sbs_operational_w) +
        n_sbs * mean_nearest_tx_power(1.2, s.channel, s.region.comm_radius_km);
    CHECK(total_power_cached(s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("uncached power equals cached power when the cache saves nothing") {
    // rho_hd -> rho_bh and an empty-cache-equivalent single cluster
    ClusteredScenario s = single_cluster_scenario(0.9);
    s.power.harddisk_fetch_w = s.power.backhaul_fetch_w * (1.0 - 1e-12);
    const double cached = total_power_cached(s);
    const double uncached =
        total_power_uncached(0.9, s.region, s.channel, s.power);
    CHECK(cached == doctest::Approx(uncached).epsilon(1e-9));
}

TEST_CASE("uncached power is linear in the backhaul draw") {
    const RegionSpec region = region_10km2();
    const ChannelParams channel = default_channel();
    PowerParams power = default_power();
    const double base = total_power_uncached(1.5, region, channel, power);
    power.backhaul_fetch_w *= 2.0;
    const double doubled = total_power_uncached(1.5, region, channel, power);
    CHECK(doubled - base ==
          doctest::Approx(1.5 * region.area_km2() * 10.0).epsilon(1e-10));
}

TEST_CASE("symmetric clusters cancel the cross-cluster transmit correction") {
    const ClusteredScenario s = mirror_scenario(0.6);
    const double n_sbs = 1.2 * s.region.area_km2();
    const double hit = hit_probability(s).clamped;
    const double per_cluster_power =
        mean_nearest_tx_power(0.6, s.channel, s.region.comm_radius_km);
    const double expected =
        n_sbs * (s.power.harddisk_fetch_w * hit + s.power.backhaul_fetch_w * (1.0 - hit) +
                 s.power.sbs_operational_w) +
        n_sbs * per_cluster_power;  // cross terms vanish by symmetry
    CHECK(total_power_cached(s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("total power rejects a populated cluster with zero density") {
    ClusteredScenario s = mirror_scenario(0.5);
    s.densities.per_cluster[1] = 0.0;
    CHECK_THROWS_AS(total_power_cached(s), std::invalid_argument);
}

TEST_CASE("coverage is one without interference and noise") {
    DensityVector empty;
    empty.per_cluster = {0.0, 0.0};
    ChannelParams c = default_channel();
    c.noise_power_w = 0.0;
    CHECK(coverage_probability(empty, c, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("coverage decreases in the threshold, the noise and the densities") {
    DensityVector densities;
    densities.per_cluster = {0.5, 0.7};
    ChannelParams c = default_channel();
    double prev = 1.0;
    for (double theta : {0.01, 0.05, 0.2, 0.8, 2.0}) {
        c.sinr_threshold = theta;
        const double value = coverage_probability(densities, c, 0.5);
        CHECK(value < prev);
        CHECK(value > 0.0);
        CHECK(value <= 1.0);
        prev = value;
    }
    c = default_channel();
    prev = 1.0;
    for (double sigma2 : {0.0, 1e-3, 1e-2, 1e-1}) {
        c.noise_power_w = sigma2;
        const double value = coverage_probability(densities, c, 0.5);
        CHECK(value <= prev);
        prev = value;
    }
    c = default_channel();
    prev = 1.0;
    for (double scale : {0.5, 1.0, 2.0, 3.0}) {
        DensityVector scaled;
        scaled.per_cluster = {0.5 * scale, 0.7 * scale};
        const double value = coverage_probability(scaled, c, 0.5);
        CHECK(value < prev);
        prev = value;
    }
}

TEST_CASE("coverage rejects pathloss exponents at the pole") {
    DensityVector densities;
    densities.per_cluster = {0.5};
    ChannelParams c = default_channel(2.0);
    CHECK_THROWS_AS(coverage_probability(densities, c, 0.5), std::invalid_argument);
}

TEST_CASE("spectral efficiency composes density, rate and coverage") {
    DensityVector densities;
    densities.per_cluster = {0.4, 0.9};
    const RegionSpec region = region_10km2();
    const ChannelParams c = default_channel();
    const double expected = densities.total() * region.area_km2() *
                            std::log1p(c.sinr_threshold) *
                            coverage_probability(densities, c, region.comm_radius_km);
    CHECK(spectral_efficiency(densities, c, region) ==
          doctest::Approx(expected).epsilon(1e-15));

    ChannelParams tiny = c;
    tiny.sinr_threshold = 1e-12;
    CHECK(spectral_efficiency(densities, tiny, region) < 1e-9);
}

TEST_CASE("energy efficiency is the spectral efficiency per consumed watt") {
    const ClusteredScenario s = mirror_scenario(0.8);
    const double expected =
        spectral_efficiency(s.densities, s.channel, s.region) / total_power_cached(s);
    CHECK(energy_efficiency(s) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(energy_efficiency(s) > 0.0);
}

TEST_CASE("the evaluator reproduces the free functions at other densities") {
    ClusteredScenario s = mirror_scenario(0.8);
    const ScenarioEvaluator eval(s);
    DensityVector other;
    other.per_cluster = {0.3, 1.1};
    ClusteredScenario moved = s;
    moved.densities = other;
    CHECK(eval.hit(other).raw == doctest::Approx(hit_probability(moved).raw));
    CHECK(eval.total_power(other) == doctest::Approx(total_power_cached(moved)));
    CHECK(eval.energy_efficiency(other) == doctest::Approx(energy_efficiency(moved)));
}

TEST_SUITE_END();
