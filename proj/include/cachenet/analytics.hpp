#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "cachenet/geometry.hpp"
#include "cachenet/popularity.hpp"

namespace cachenet {

// Fetch and infrastructure power figures of one active SBS.
struct PowerParams {
    double sbs_operational_w = 0.0;   // fixed draw of an active SBS
    double backhaul_fetch_w = 0.0;    // file retrieval over the backhaul (miss)
    double harddisk_fetch_w = 0.0;    // file retrieval from the local cache (hit)

    void validate() const;
};

// Active-SBS density per cluster, per km².
struct DensityVector {
    std::vector<double> per_cluster;

    double total() const;
    std::size_t size() const { return per_cluster.size(); }
};

// Everything the closed-form analysis needs: per-user profiles and cluster
// memberships, the per-cluster cache sets, and the physical parameters.
struct ClusteredScenario {
    std::vector<PopularityProfile> profiles;
    std::vector<std::size_t> assignment;  // user -> cluster
    std::vector<CacheSet> cache_sets;
    RegionSpec region;
    ChannelParams channel;
    PowerParams power;
    DensityVector densities;

    std::size_t num_clusters() const { return cache_sets.size(); }
    std::size_t num_users() const { return profiles.size(); }
    void validate() const;
};

struct HitProbability {
    double raw;      // per-cluster hit masses summed; may exceed 1 when caches overlap
    double clamped;  // raw clamped to [0, 1]
};

// (1/U) Σ_k Σ_u (Σ_{i∈Δ_k} p_iu)(1 − e^{−λ_sk π R²}). The raw sum counts a
// file cached by several clusters once per cluster, so it can exceed 1; the
// Monte Carlo estimator measures the true union event for comparison.
HitProbability hit_probability(const ClusteredScenario& scenario);

// Truncated mean transmit power toward the nearest SBS of a density-λ_sk
// process: ρ0 γ(α/2+1, πλ_sk R²) / (λ_sk π)^{α/2}. Links longer than R carry
// zero power. Defined as 0 at λ_sk = 0.
double mean_nearest_tx_power(double lambda_sk, const ChannelParams& channel,
                             double comm_radius_km);

// E{ρ_k^{2/α}} = ρ0^{2/α} γ(2, πλ_sk R²) / (λ_sk π); 0 at λ_sk = 0.
double mean_nearest_tx_power_moment(double lambda_sk, const ChannelParams& channel,
                                    double comm_radius_km);

// Average total consumed power of the cache-enabled network: infrastructure,
// hit/miss fetch, and the per-cluster transmit terms including the
// cross-cluster correction. Throws if a cluster with assigned users has zero
// density (its association is undefined).
double total_power_cached(const ClusteredScenario& scenario);

// Same network without caching: every fetch crosses the backhaul.
double total_power_uncached(double lambda_s, const RegionSpec& region,
                            const ChannelParams& channel, const PowerParams& power);

// exp(−θσ²/ρ0) · Π_k exp(−πλ_sk Γ(1+2/α)Γ(1−2/α)(θ/ρ0)^{2/α} E{ρ_k^{2/α}}).
double coverage_probability(const DensityVector& densities, const ChannelParams& channel,
                            double comm_radius_km);

// λ_s π R_n² · ln(1+θ) · coverage.
double spectral_efficiency(const DensityVector& densities, const ChannelParams& channel,
                           const RegionSpec& region);

// spectral efficiency divided by total consumed power.
double energy_efficiency(const ClusteredScenario& scenario);

// Precomputes the per-(cluster, user) cached masses so the density optimizer
// can re-evaluate the closed forms cheaply as the density vector changes.
class ScenarioEvaluator {
public:
    explicit ScenarioEvaluator(const ClusteredScenario& scenario);

    HitProbability hit(const DensityVector& densities) const;
    double total_power(const DensityVector& densities) const;
    double energy_efficiency(const DensityVector& densities) const;

    const ClusteredScenario& scenario() const { return *scenario_; }
    double cached_mass_of(std::size_t cluster, std::size_t user) const {
        return masses_[cluster * num_users_ + user];
    }

private:
    const ClusteredScenario* scenario_;
    std::size_t num_users_;
    std::vector<double> masses_;       // K × U, row-major
    std::vector<std::size_t> members_; // users grouped by cluster
    std::vector<std::size_t> member_offsets_;
};


}  // namespace cachenet
