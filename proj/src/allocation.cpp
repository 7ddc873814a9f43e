#include "cachenet/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "cachenet/rng.hpp"
#include "cachenet/special.hpp"

namespace cachenet {

namespace {

// K × U cached-mass table
std::vector<double> mass_table(std::span<const PopularityProfile> profiles,
                               std::span<const CacheSet> cache_sets) {
    const std::size_t U = profiles.size();
    const std::size_t K = cache_sets.size();
    std::vector<double> m(K * U);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t u = 0; u < U; ++u)
            m[k * U + u] = cached_mass(profiles[u], cache_sets[k]);
    return m;
}

// best in-range weight toward an SBS of cluster k, per (user, cluster)
std::vector<double> best_weights(const AllocationMatrix& alloc, const LinkWeights& w,
                                 std::size_t num_clusters) {
    std::vector<double> best(w.num_users * num_clusters, 0.0);
    for (std::size_t u = 0; u < w.num_users; ++u) {
        for (std::uint32_t s : w.ordering[u]) {
            const int k = alloc.sbs_cluster[s];
            if (k < 0) continue;
            double& slot = best[u * num_clusters + static_cast<std::size_t>(k)];
            slot = std::max(slot, w.weight(u, s));
        }
    }
    return best;
}

double objective_from_masses(const AllocationMatrix& alloc, const LinkWeights& w,
                             const std::vector<double>& masses, std::size_t K) {
    const std::vector<double> best = best_weights(alloc, w, K);
    const std::size_t U = w.num_users;
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t u = 0; u < U; ++u)
            total += masses[k * U + u] * best[u * K + k];
    return total;
}

}  // namespace

std::vector<int> AllocationMatrix::column_counts() const {
    std::vector<int> counts(num_clusters, 0);
    for (int k : sbs_cluster)
        if (k >= 0) ++counts[static_cast<std::size_t>(k)];
    return counts;
}

LinkWeights build_weights(const NetworkSnapshot& snapshot, const ChannelParams& channel,
                          double comm_radius_km) {
    LinkWeights w;
    w.num_users = snapshot.users.size();
    w.num_sbs = snapshot.sbs.size();
    w.omega.assign(w.num_users * w.num_sbs, 0.0);
    w.ordering.resize(w.num_users);
    const double alpha = channel.pathloss_exponent;
    for (std::size_t u = 0; u < w.num_users; ++u) {
        for (std::size_t s = 0; s < w.num_sbs; ++s) {
            const double r = distance(snapshot.users[u], snapshot.sbs[s]);
            if (r >= comm_radius_km) continue;  // excluded link
            w.omega[u * w.num_sbs + s] = std::pow(r, -alpha);
            w.ordering[u].push_back(static_cast<std::uint32_t>(s));
        }
        std::stable_sort(w.ordering[u].begin(), w.ordering[u].end(),
                         [&](std::uint32_t a, std::uint32_t b) {
                             return w.weight(u, a) > w.weight(u, b);
                         });
    }
    return w;
}

double allocation_objective(const AllocationMatrix& alloc, const LinkWeights& weights,
                            std::span<const PopularityProfile> profiles,
                            std::span<const CacheSet> cache_sets) {
    if (alloc.sbs_cluster.size() != weights.num_sbs)
        throw std::invalid_argument("allocation_objective: SBS count mismatch");
    for (int k : alloc.sbs_cluster)
        if (k >= static_cast<int>(cache_sets.size()))
            throw std::invalid_argument("allocation_objective: cluster index out of range");
    return objective_from_masses(alloc, weights, mass_table(profiles, cache_sets),
                                 cache_sets.size());
}

AllocationMatrix greedy_allocate(const LinkWeights& weights,
                                 std::span<const PopularityProfile> profiles,
                                 std::span<const CacheSet> cache_sets,
                                 const ClusterQuotas& quotas) {
    const std::size_t U = weights.num_users;
    const std::size_t S = weights.num_sbs;
    const std::size_t K = cache_sets.size();
    if (quotas.per_cluster.size() != K)
        throw std::invalid_argument("greedy_allocate: quota/cluster count mismatch");
    const std::vector<double> masses = mass_table(profiles, cache_sets);

    AllocationMatrix alloc;
    alloc.sbs_cluster.assign(S, -1);
    alloc.num_clusters = K;
    std::vector<int> remaining = quotas.per_cluster;
    std::vector<double> best(U * K, 0.0);  // current best weight per (user, cluster)

    auto marginal_gain = [&](std::size_t s, std::size_t k) {
        double gain = 0.0;
        for (std::size_t u = 0; u < U; ++u) {
            const double w = weights.weight(u, s);
            const double cur = best[u * K + k];
            if (w > cur) gain += masses[k * U + u] * (w - cur);
        }
        return gain;
    };

    struct Candidate {
        double gain;
        std::uint32_t sbs;
        std::uint32_t cluster;
        std::uint32_t round;  // when the gain was computed
        bool operator<(const Candidate& other) const { return gain < other.gain; }
    };
    std::priority_queue<Candidate> heap;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t k = 0; k < K; ++k) {
            if (remaining[k] <= 0) continue;
            const double g = marginal_gain(s, k);
            if (g > 0.0)
                heap.push({g, static_cast<std::uint32_t>(s),
                           static_cast<std::uint32_t>(k), 0});
        }

    std::uint32_t round = 0;
    while (!heap.empty()) {
        Candidate top = heap.top();
        heap.pop();
        if (alloc.sbs_cluster[top.sbs] >= 0) continue;           // row taken
        if (remaining[top.cluster] <= 0) continue;               // quota exhausted
        if (top.round != round) {                                // stale gain, refresh
            top.gain = marginal_gain(top.sbs, top.cluster);
            top.round = round;
            if (top.gain > 0.0) heap.push(top);
            continue;
        }
        if (top.gain <= 0.0) break;
        alloc.sbs_cluster[top.sbs] = static_cast<int>(top.cluster);
        --remaining[top.cluster];
        for (std::size_t u = 0; u < U; ++u) {
            const double w = weights.weight(u, top.sbs);
            double& slot = best[u * K + top.cluster];
            slot = std::max(slot, w);
        }
        ++round;
    }
    return alloc;
}

AllocationMatrix brute_force_allocate(const LinkWeights& weights,
                                      std::span<const PopularityProfile> profiles,
                                      std::span<const CacheSet> cache_sets,
                                      const ClusterQuotas& quotas) {
    const std::size_t S = weights.num_sbs;
    const std::size_t K = cache_sets.size();
    if (quotas.per_cluster.size() != K)
        throw std::invalid_argument("brute_force_allocate: quota/cluster count mismatch");
    const double combos = std::pow(static_cast<double>(K + 1), static_cast<double>(S));
    if (combos > 1e7)
        throw std::invalid_argument("brute_force_allocate: instance too large");
    const std::vector<double> masses = mass_table(profiles, cache_sets);

    AllocationMatrix current;
    current.sbs_cluster.assign(S, -1);
    current.num_clusters = K;
    AllocationMatrix best_alloc = current;
    double best_value = objective_from_masses(current, weights, masses, K);

    std::vector<int> counts(K, 0);
    // odometer over rows; the last row advances fastest, so candidates appear
    // in lexicographic order and ties keep the first (smallest) assignment
    while (true) {
        int pos = static_cast<int>(S) - 1;
        for (; pos >= 0; --pos) {
            const int k = current.sbs_cluster[static_cast<std::size_t>(pos)];
            if (k >= 0) --counts[static_cast<std::size_t>(k)];
            if (k + 1 < static_cast<int>(K)) {
                current.sbs_cluster[static_cast<std::size_t>(pos)] = k + 1;
                ++counts[static_cast<std::size_t>(k + 1)];
                break;
            }
            current.sbs_cluster[static_cast<std::size_t>(pos)] = -1;
        }
        if (pos < 0) break;
        bool feasible = true;
        for (std::size_t k = 0; k < K; ++k)
            if (counts[k] > quotas.per_cluster[k]) feasible = false;
        if (!feasible) continue;
        const double value = objective_from_masses(current, weights, masses, K);
        if (value > best_value) {
            best_value = value;
            best_alloc = current;
        }
    }
    return best_alloc;
}

SubmodularityReport submodularity_check(const LinkWeights& weights,
                                        std::span<const PopularityProfile> profiles,
                                        std::span<const CacheSet> cache_sets,
                                        long trials, std::uint64_t seed) {
    const std::size_t S = weights.num_sbs;
    const std::size_t K = cache_sets.size();
    const std::vector<double> masses = mass_table(profiles, cache_sets);
    Rng rng(seed);
    SubmodularityReport report;
    AllocationMatrix larger, smaller;
    larger.num_clusters = smaller.num_clusters = K;
    for (long t = 0; t < trials; ++t) {
        larger.sbs_cluster.assign(S, -1);
        smaller.sbs_cluster.assign(S, -1);
        std::vector<std::size_t> unassigned;
        for (std::size_t s = 0; s < S; ++s) {
            if (rng.uniform() < 0.5) {
                const int k = static_cast<int>(rng.index(K));
                larger.sbs_cluster[s] = k;
                if (rng.uniform() < 0.5) smaller.sbs_cluster[s] = k;  // X ⊆ Y
            } else {
                unassigned.push_back(s);
            }
        }
        if (unassigned.empty()) continue;
        const std::size_t add_s = unassigned[rng.index(unassigned.size())];
        const int add_k = static_cast<int>(rng.index(K));
        ++report.trials;

        const double f_small = objective_from_masses(smaller, weights, masses, K);
        const double f_large = objective_from_masses(larger, weights, masses, K);
        smaller.sbs_cluster[add_s] = add_k;
        larger.sbs_cluster[add_s] = add_k;
        const double f_small_add = objective_from_masses(smaller, weights, masses, K);
        const double f_large_add = objective_from_masses(larger, weights, masses, K);

        if ((f_small_add - f_small) - (f_large_add - f_large) < -1e-12)
            ++report.violations;
        if (f_small_add < f_small - 1e-15 || f_large_add < f_large - 1e-15)
            ++report.monotonicity_violations;
    }
    return report;
}

namespace {

// Coverage of a typical user when every assigned SBS transmits with channel
// inversion toward its nearest same-cluster user within R (silent when it
// has none): the snapshot analog of the closed-form Laplace transform, with
// the allocation's column counts as the per-cluster densities and the
// empirical ρ^{2/α} moments of the realized serving links.
double snapshot_coverage(const NetworkSnapshot& snapshot,
                         const ClusteredScenario& scenario,
                         const AllocationMatrix& alloc) {
    const double alpha = scenario.channel.pathloss_exponent;
    const double rho0 = scenario.channel.target_rx_power_w;
    const double theta = scenario.channel.sinr_threshold;
    const double comm_r = scenario.region.comm_radius_km;
    const double disc_r2 = scenario.region.radius_km * scenario.region.radius_km;

    double moment_sum = 0.0;  // Σ_s ρ_s^{2/α} over assigned SBSs
    for (std::size_t s = 0; s < snapshot.sbs.size(); ++s) {
        const int k = alloc.sbs_cluster[s];
        if (k < 0) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < snapshot.users.size(); ++u) {
            if (scenario.assignment[u] != static_cast<std::size_t>(k)) continue;
            nearest = std::min(nearest, distance(snapshot.sbs[s], snapshot.users[u]));
        }
        if (nearest > comm_r) continue;  // no link to serve, SBS stays silent
        moment_sum += std::pow(rho0 * std::pow(nearest, alpha), 2.0 / alpha);
    }
    const double exponent =
        theta * scenario.channel.noise_power_w / rho0 +
        gamma_reflection_product(2.0 / alpha) * std::pow(theta / rho0, 2.0 / alpha) *
            moment_sum / disc_r2;
    return std::exp(-exponent);
}

// Exact request expectation of fetch + transmit power for one allocation on
// a snapshot, scaled per concurrently served link.
double snapshot_power(const NetworkSnapshot& snapshot, const ClusteredScenario& scenario,
                      const AllocationMatrix& alloc) {
    const std::size_t U = snapshot.users.size();
    const std::size_t S = snapshot.sbs.size();
    const std::size_t K = scenario.num_clusters();
    const double comm_r = scenario.region.comm_radius_km;
    const double alpha = scenario.channel.pathloss_exponent;
    const double rho0 = scenario.channel.target_rx_power_w;

    const std::size_t F = scenario.profiles.empty() ? 0 : scenario.profiles[0].probs.size();
    std::vector<std::uint8_t> cached(K * F, 0);
    for (std::size_t k = 0; k < K; ++k)
        for (std::uint32_t f : scenario.cache_sets[k].files) cached[k * F + f] = 1;

    double per_user_sum = 0.0;
    std::vector<double> nearest(K);
    std::vector<std::size_t> order(K);
    for (std::size_t u = 0; u < U; ++u) {
        // nearest allocated SBS of each cluster within range
        std::fill(nearest.begin(), nearest.end(),
                  std::numeric_limits<double>::infinity());
        for (std::size_t s = 0; s < S; ++s) {
            const int k = alloc.sbs_cluster[s];
            if (k < 0) continue;
            const double d = distance(snapshot.users[u], snapshot.sbs[s]);
            if (d >= comm_r) continue;
            nearest[static_cast<std::size_t>(k)] =
                std::min(nearest[static_cast<std::size_t>(k)], d);
        }
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return nearest[a] < nearest[b]; });

        const std::size_t own = scenario.assignment[u];
        const double own_tx = std::isinf(nearest[own])
                                  ? 0.0
                                  : rho0 * std::pow(nearest[own], alpha);
        const auto& probs = scenario.profiles[u].probs;
        double expected = 0.0;
        for (std::size_t f = 0; f < F; ++f) {
            const double p = probs[f];
            if (p == 0.0) continue;
            double serve = -1.0;
            for (std::size_t k : order) {
                if (std::isinf(nearest[k])) break;
                if (cached[k * F + f]) {
                    serve = nearest[k];
                    break;
                }
            }
            if (serve >= 0.0) {  // hit at the closest storing SBS
                expected += p * (scenario.power.harddisk_fetch_w +
                                 rho0 * std::pow(serve, alpha));
            } else {  // backhaul miss via the own-cluster SBS, silent if none
                expected += p * (scenario.power.backhaul_fetch_w + own_tx);
            }
        }
        per_user_sum += expected;
    }

    const double n_sbs = static_cast<double>(S);
    const double per_link = U ? per_user_sum / static_cast<double>(U) : 0.0;
    return n_sbs * scenario.power.sbs_operational_w + n_sbs * per_link;
}

}  // namespace

EeGainResult allocation_ee_gain(const NetworkSnapshot& snapshot,
                                const ClusteredScenario& scenario,
                                const ClusterQuotas& quotas, std::uint64_t seed) {
    const std::size_t S = snapshot.sbs.size();
    const std::size_t K = scenario.num_clusters();
    const LinkWeights weights =
        build_weights(snapshot, scenario.channel, scenario.region.comm_radius_km);

    // uniform random quota-respecting allocation
    Rng rng(seed);
    AllocationMatrix random_alloc;
    random_alloc.sbs_cluster.assign(S, -1);
    random_alloc.num_clusters = K;
    std::vector<int> remaining = quotas.per_cluster;
    std::vector<std::size_t> order(S);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = S; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    std::vector<std::size_t> open;
    for (std::size_t s : order) {
        open.clear();
        for (std::size_t k = 0; k < K; ++k)
            if (remaining[k] > 0) open.push_back(k);
        if (open.empty()) break;
        const std::size_t k = open[rng.index(open.size())];
        random_alloc.sbs_cluster[s] = static_cast<int>(k);
        --remaining[k];
    }

    const AllocationMatrix greedy_alloc =
        greedy_allocate(weights, scenario.profiles, scenario.cache_sets, quotas);

    const double rate_factor = scenario.densities.total() * scenario.region.area_km2() *
                               std::log1p(scenario.channel.sinr_threshold);
    EeGainResult result;
    result.ee_random = rate_factor *
                       snapshot_coverage(snapshot, scenario, random_alloc) /
                       snapshot_power(snapshot, scenario, random_alloc);
    result.ee_optimized = rate_factor *
                          snapshot_coverage(snapshot, scenario, greedy_alloc) /
                          snapshot_power(snapshot, scenario, greedy_alloc);
    return result;
}

void write_allocation_csv(std::ostream& out, const NetworkSnapshot& snapshot,
                          const AllocationMatrix& alloc) {
    out << "sbs_index,x_km,y_km,assigned_cluster\n";
    out.precision(12);
    for (std::size_t s = 0; s < snapshot.sbs.size(); ++s)
        out << s << "," << snapshot.sbs[s].x << "," << snapshot.sbs[s].y << ","
            << alloc.sbs_cluster[s] << "\n";
}

}  // namespace cachenet
