#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cachenet/analytics.hpp"

namespace cachenet {

struct SimEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;  // sample std / sqrt(n)
    long n = 0;
};

struct SimConfig {
    long num_realizations = 1;
    std::uint64_t seed = 0;
    ClusteredScenario scenario;
    int threads = 0;                         // 0 = hardware concurrency
    double interferer_disc_multiplier = 5.0; // interference sampled on a disc of
                                             // this multiple of R_n around the user
};

// Fraction of (user, request) draws whose requested file is cached at some
// SBS within R of the user: the true union-event hit rate, simulated from
// per-cluster PPP realizations. Users are placed at the origin (Slivnyak).
SimEstimate simulate_hit(const SimConfig& config);

// Empirical P(SINR ≥ θ) at a typical user. The serving link is channel
// inverted (received power ρ0·|h|²); each interferer transmits at the power
// of a typical link of its own cluster: distance drawn from the
// nearest-point law 2πλ_sk r e^{−λ_sk π r²}, zero power beyond R.
SimEstimate simulate_coverage(const SimConfig& config);

// Per-realization total power: operational draw of the sampled SBS count,
// plus hit/miss fetch and channel-inversion transmit power of a typical
// request under the association rule (closest storing SBS on a hit, closest
// own-cluster SBS within R on a miss, silence when neither exists), scaled
// by the mean number of concurrently served links.
SimEstimate simulate_total_power(const SimConfig& config);

// Direct sampling of the truncated nearest-link transmit power: distances
// from the nearest-point law by CDF inversion, power ρ0 r^α for r ≤ R and 0
// beyond. Validates the closed form of the same quantity.
SimEstimate simulate_mean_nearest_tx_power(double lambda_sk, const ChannelParams& channel,
                                           double comm_radius_km, long n,
                                           std::uint64_t seed);

// Deterministic pairwise reduction; result is independent of how realization
// work was split across threads.
double pairwise_sum(std::span<const double> values);

struct ValidationRow {
    std::string name;
    SimEstimate estimate;
    double analytic_value = 0.0;

    double z_score() const {
        return estimate.stderr_mean > 0.0
                   ? (estimate.mean - analytic_value) / estimate.stderr_mean
                   : 0.0;
    }
};

void write_validation_table(std::ostream& out, std::span<const ValidationRow> rows);

}  // namespace cachenet
