#include "cachenet/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cachenet/special.hpp"

namespace cachenet {

void PowerParams::validate() const {
    if (sbs_operational_w < 0.0 || backhaul_fetch_w < 0.0 || harddisk_fetch_w < 0.0)
        throw std::invalid_argument("power: negative power value");
    if (!(harddisk_fetch_w < backhaul_fetch_w))
        throw std::invalid_argument("power: cache fetch must cost less than backhaul fetch");
}

double DensityVector::total() const {
    return std::accumulate(per_cluster.begin(), per_cluster.end(), 0.0);
}

void ClusteredScenario::validate() const {
    region.validate();
    channel.validate();
    power.validate();
    const std::size_t K = cache_sets.size();
    if (K == 0) throw std::invalid_argument("scenario: no clusters");
    if (densities.size() != K)
        throw std::invalid_argument("scenario: density/cluster count mismatch");
    if (assignment.size() != profiles.size())
        throw std::invalid_argument("scenario: assignment/profile count mismatch");
    for (std::size_t c : assignment)
        if (c >= K) throw std::invalid_argument("scenario: assignment index out of range");
    for (double d : densities.per_cluster)
        if (d < 0.0) throw std::invalid_argument("scenario: negative density");
    if (densities.total() > region.sbs_density_max * (1.0 + 1e-9))
        throw std::invalid_argument("scenario: total density exceeds the deployment cap");
}

HitProbability hit_probability(const ClusteredScenario& scenario) {
    return ScenarioEvaluator(scenario).hit(scenario.densities);
}

double mean_nearest_tx_power(double lambda_sk, const ChannelParams& channel,
                             double comm_radius_km) {
    if (lambda_sk < 0.0) throw std::invalid_argument("mean_nearest_tx_power: negative density");
    if (lambda_sk == 0.0) return 0.0;
    const double alpha = channel.pathloss_exponent;
    const double x = kPi * lambda_sk * comm_radius_km * comm_radius_km;
    return channel.target_rx_power_w * lower_incomplete_gamma(alpha / 2.0 + 1.0, x) /
           std::pow(lambda_sk * kPi, alpha / 2.0);
}

double mean_nearest_tx_power_moment(double lambda_sk, const ChannelParams& channel,
                                    double comm_radius_km) {
    if (lambda_sk < 0.0)
        throw std::invalid_argument("mean_nearest_tx_power_moment: negative density");
    if (lambda_sk == 0.0) return 0.0;
    const double alpha = channel.pathloss_exponent;
    const double x = kPi * lambda_sk * comm_radius_km * comm_radius_km;
    return std::pow(channel.target_rx_power_w, 2.0 / alpha) *
           lower_incomplete_gamma(2.0, x) / (lambda_sk * kPi);
}

double total_power_cached(const ClusteredScenario& scenario) {
    return ScenarioEvaluator(scenario).total_power(scenario.densities);
}

double total_power_uncached(double lambda_s, const RegionSpec& region,
                            const ChannelParams& channel, const PowerParams& power) {
    if (!(lambda_s > 0.0))
        throw std::invalid_argument("total_power_uncached: density must be > 0");
    const double n_sbs = lambda_s * region.area_km2();
    return n_sbs * power.backhaul_fetch_w + n_sbs * power.sbs_operational_w +
           n_sbs * mean_nearest_tx_power(lambda_s, channel, region.comm_radius_km);
}

double coverage_probability(const DensityVector& densities, const ChannelParams& channel,
                            double comm_radius_km) {
    channel.validate();  // rejects α ≤ 2 before the Γ(1 − 2/α) pole
    const double alpha = channel.pathloss_exponent;
    const double theta = channel.sinr_threshold;
    const double rho0 = channel.target_rx_power_w;
    const double gamma_pair = gamma_reflection_product(2.0 / alpha);
    double exponent = theta * channel.noise_power_w / rho0;
    for (double lambda_sk : densities.per_cluster) {
        if (lambda_sk < 0.0)
            throw std::invalid_argument("coverage_probability: negative density");
        if (lambda_sk == 0.0) continue;  // no SBSs of that cluster, factor is 1
        exponent += kPi * lambda_sk * gamma_pair * std::pow(theta / rho0, 2.0 / alpha) *
                    mean_nearest_tx_power_moment(lambda_sk, channel, comm_radius_km);
    }
    return std::exp(-exponent);
}

double spectral_efficiency(const DensityVector& densities, const ChannelParams& channel,
                           const RegionSpec& region) {
    const double lambda_s = densities.total();
    return lambda_s * region.area_km2() * std::log1p(channel.sinr_threshold) *
           coverage_probability(densities, channel, region.comm_radius_km);
}

double energy_efficiency(const ClusteredScenario& scenario) {
    return ScenarioEvaluator(scenario).energy_efficiency(scenario.densities);
}

ScenarioEvaluator::ScenarioEvaluator(const ClusteredScenario& scenario)
    : scenario_(&scenario), num_users_(scenario.num_users()) {
    scenario.validate();
    const std::size_t K = scenario.num_clusters();
    masses_.resize(K * num_users_);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t u = 0; u < num_users_; ++u)
            masses_[k * num_users_ + u] =
                cached_mass(scenario.profiles[u], scenario.cache_sets[k]);

    // members grouped by cluster for the transmit-power sums
    member_offsets_.assign(K + 1, 0);
    for (std::size_t c : scenario.assignment) ++member_offsets_[c + 1];
    for (std::size_t k = 0; k < K; ++k) member_offsets_[k + 1] += member_offsets_[k];
    members_.resize(scenario.assignment.size());
    std::vector<std::size_t> cursor(member_offsets_.begin(), member_offsets_.end() - 1);
    for (std::size_t u = 0; u < scenario.assignment.size(); ++u)
        members_[cursor[scenario.assignment[u]]++] = u;
}

HitProbability ScenarioEvaluator::hit(const DensityVector& densities) const {
    const ClusteredScenario& s = *scenario_;
    const double r2 = s.region.comm_radius_km * s.region.comm_radius_km;
    double raw = 0.0;
    for (std::size_t k = 0; k < s.num_clusters(); ++k) {
        const double q_k = 1.0 - std::exp(-densities.per_cluster[k] * kPi * r2);
        if (q_k == 0.0) continue;
        double mass_sum = 0.0;
        for (std::size_t u = 0; u < num_users_; ++u)
            mass_sum += masses_[k * num_users_ + u];
        raw += mass_sum * q_k;
    }
    raw /= static_cast<double>(num_users_ ? num_users_ : 1);
    return {raw, std::clamp(raw, 0.0, 1.0)};
}

double ScenarioEvaluator::total_power(const DensityVector& densities) const {
    const ClusteredScenario& s = *scenario_;
    const std::size_t K = s.num_clusters();
    const double lambda_s = densities.total();
    const double n_sbs = lambda_s * s.region.area_km2();
    const double r2 = s.region.comm_radius_km * s.region.comm_radius_km;

    // A probability enters the fetch model, so the clamped value is used;
    // the raw sum is reported alongside by hit().
    const double p_hit = hit(densities).clamped;
    double total = n_sbs * (s.power.harddisk_fetch_w * p_hit +
                            s.power.backhaul_fetch_w * (1.0 - p_hit) +
                            s.power.sbs_operational_w);

    std::vector<double> q(K), mean_power(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double lambda_sk = densities.per_cluster[k];
        q[k] = 1.0 - std::exp(-lambda_sk * kPi * r2);
        mean_power[k] =
            mean_nearest_tx_power(lambda_sk, s.channel, s.region.comm_radius_km);
        if (lambda_sk == 0.0 && member_offsets_[k + 1] > member_offsets_[k])
            throw std::invalid_argument(
                "total_power_cached: cluster with assigned users has zero density");
    }

    double tx = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t begin = member_offsets_[k];
        const std::size_t end = member_offsets_[k + 1];
        if (begin == end) continue;
        tx += static_cast<double>(end - begin) * mean_power[k];
        for (std::size_t j = 0; j < K; ++j) {
            if (j == k || q[j] == 0.0) continue;
            double mass = 0.0;
            for (std::size_t idx = begin; idx < end; ++idx)
                mass += masses_[j * num_users_ + members_[idx]];
            tx += mass * q[j] * (mean_power[j] - mean_power[k]);
        }
    }
    total += n_sbs / static_cast<double>(num_users_ ? num_users_ : 1) * tx;
    return total;
}

double ScenarioEvaluator::energy_efficiency(const DensityVector& densities) const {
    const double power = total_power(densities);
    if (!(power > 0.0)) throw std::invalid_argument("energy_efficiency: zero total power");
    return spectral_efficiency(densities, scenario_->channel, scenario_->region) / power;
}


}  // namespace cachenet
