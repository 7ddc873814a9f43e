#include "cachenet/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cachenet/rng.hpp"

namespace cachenet {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// index of the nearest centroid; ties go to the lower index
std::size_t nearest_centroid(const std::vector<double>& p,
                             const std::vector<PopularityProfile>& centroids) {
    std::size_t best = 0;
    double best_d = squared_distance(p, centroids[0].probs);
    for (std::size_t k = 1; k < centroids.size(); ++k) {
        const double d = squared_distance(p, centroids[k].probs);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

}  // namespace

ClusterModel kmeans(std::span<const PopularityProfile> profiles,
                    std::vector<PopularityProfile> initial_centroids,
                    std::size_t max_iters, double tol) {
    if (profiles.empty()) throw std::invalid_argument("kmeans: no profiles");
    if (initial_centroids.empty()) throw std::invalid_argument("kmeans: no centroids");
    const std::size_t U = profiles.size();
    const std::size_t K = initial_centroids.size();
    const std::size_t F = profiles[0].probs.size();
    for (const auto& c : initial_centroids)
        if (c.probs.size() != F) throw std::invalid_argument("kmeans: centroid dimension mismatch");

    ClusterModel model;
    model.num_clusters = K;
    model.centroids = std::move(initial_centroids);
    model.assignment.assign(U, 0);
    model.member_counts.assign(K, 0);

    std::vector<std::size_t> assignment(U, K);  // K = sentinel "unassigned"
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t u = 0; u < U; ++u) {
            const std::size_t k = nearest_centroid(profiles[u].probs, model.centroids);
            if (k != assignment[u]) {
                assignment[u] = k;
                changed = true;
            }
        }

        std::fill(model.member_counts.begin(), model.member_counts.end(), 0);
        for (std::size_t u = 0; u < U; ++u) ++model.member_counts[assignment[u]];

        // Reseed emptied clusters at the profile farthest from its own
        // centroid. Skipped when every profile already sits on a centroid.
        for (std::size_t k = 0; k < K; ++k) {
            if (model.member_counts[k] != 0) continue;
            double worst = 0.0;
            std::size_t worst_u = U;
            for (std::size_t u = 0; u < U; ++u) {
                if (model.member_counts[assignment[u]] <= 1) continue;
                const double d = squared_distance(profiles[u].probs,
                                                  model.centroids[assignment[u]].probs);
                if (d > worst) {
                    worst = d;
                    worst_u = u;
                }
            }
            if (worst_u == U) continue;  // nothing strictly off-centroid
            --model.member_counts[assignment[worst_u]];
            assignment[worst_u] = k;
            ++model.member_counts[k];
            model.centroids[k] = profiles[worst_u];
            changed = true;
        }

        double movement_sq = 0.0;
        std::vector<double> mean(F);
        for (std::size_t k = 0; k < K; ++k) {
            if (model.member_counts[k] == 0) continue;
            std::fill(mean.begin(), mean.end(), 0.0);
            for (std::size_t u = 0; u < U; ++u) {
                if (assignment[u] != k) continue;
                const auto& p = profiles[u].probs;
                for (std::size_t i = 0; i < F; ++i) mean[i] += p[i];
            }
            const double inv = 1.0 / static_cast<double>(model.member_counts[k]);
            for (double& v : mean) v *= inv;
            movement_sq = std::max(movement_sq,
                                   squared_distance(mean, model.centroids[k].probs));
            model.centroids[k].probs = mean;
        }

        model.assignment = assignment;
        if (!changed || std::sqrt(movement_sq) < tol) break;
    }
    return model;
}

double cluster_variance(std::span<const PopularityProfile> profiles,
                        std::span<const std::size_t> members,
                        const PopularityProfile& centroid) {
    if (members.empty()) throw std::invalid_argument("cluster_variance: empty member set");
    double acc = 0.0;
    for (std::size_t u : members)
        acc += squared_distance(profiles[u].probs, centroid.probs);
    return std::max(acc / static_cast<double>(members.size()), kVarianceFloor);
}

double log_likelihood(const ClusterModel& model, std::size_t num_users,
                      std::size_t num_files) {
    const double U = static_cast<double>(num_users);
    const double F = static_cast<double>(num_files);
    double acc = 0.0;
    for (std::size_t k = 0; k < model.num_clusters; ++k) {
        const double uk = static_cast<double>(model.member_counts[k]);
        if (uk == 0.0)
            throw std::invalid_argument("log_likelihood: empty cluster");
        const double var = std::max(model.variances[k], kVarianceFloor);
        // Σd²/(2σ̂²) equals U_k/2 at the unfloored empirical variance; the
        // explicit sum keeps the value exact when the floor is active.
        const double quad = k < model.sum_squared_distances.size()
                                ? model.sum_squared_distances[k] / (2.0 * var)
                                : 0.5 * uk;
        acc += -0.5 * uk * (kLog2Pi - 2.0 * std::log(uk / U) + F * std::log(var)) -
               quad;
    }
    return acc;
}

double aic_score(const ClusterModel& model) {
    return 2.0 * static_cast<double>(model.num_params) - 2.0 * model.log_likelihood;
}

void score_model(ClusterModel& model, std::span<const PopularityProfile> profiles,
                 std::size_t num_files) {
    const std::size_t U = profiles.size();
    const double F = static_cast<double>(num_files);
    model.variances.assign(model.num_clusters, kVarianceFloor);
    model.sum_squared_distances.assign(model.num_clusters, 0.0);

    for (std::size_t k = 0; k < model.num_clusters; ++k) {
        if (model.member_counts[k] == 0) continue;
        double acc = 0.0;
        for (std::size_t u = 0; u < U; ++u) {
            if (model.assignment[u] != k) continue;
            double d2 = 0.0;
            const auto& p = profiles[u].probs;
            const auto& c = model.centroids[k].probs;
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double d = p[i] - c[i];
                d2 += d * d;
            }
            acc += d2;
        }
        model.sum_squared_distances[k] = acc;
    }

    // A singleton offers no information about its own spread, and its zero
    // MLE variance would reward the model with an unbounded density spike;
    // it takes the pooled variance of the multi-member clusters instead.
    double pooled_sum = 0.0;
    std::size_t pooled_members = 0;
    for (std::size_t k = 0; k < model.num_clusters; ++k) {
        if (model.member_counts[k] < 2) continue;
        pooled_sum += model.sum_squared_distances[k];
        pooled_members += model.member_counts[k];
    }
    const double pooled =
        pooled_members > 0 ? pooled_sum / static_cast<double>(pooled_members)
                           : kVarianceFloor;

    double log_lik = 0.0;
    for (std::size_t k = 0; k < model.num_clusters; ++k) {
        const std::size_t uk = model.member_counts[k];
        if (uk == 0) continue;  // U_k → 0 limit contributes nothing
        const double raw = model.sum_squared_distances[k] / static_cast<double>(uk);
        const double var = std::max(uk >= 2 ? raw : pooled, kVarianceFloor);
        model.variances[k] = var;
        const double ukd = static_cast<double>(uk);
        log_lik += -0.5 * ukd *
                       (kLog2Pi - 2.0 * std::log(ukd / static_cast<double>(U)) +
                        F * std::log(var)) -
                   model.sum_squared_distances[k] / (2.0 * var);
    }
    model.log_likelihood = log_lik;
    model.num_params = model.num_clusters * (num_files + 1);
    model.aic = aic_score(model);
}

ClusterSearchResult cluster_users(std::span<const PopularityProfile> profiles,
                                  SearchRange range, std::uint64_t seed,
                                  std::size_t patience) {
    const std::size_t U = profiles.size();
    if (range.nc_min < 1 || range.nc_min > range.nc_max)
        throw std::invalid_argument("cluster_users: bad search range");
    if (range.nc_min > U)
        throw std::invalid_argument("cluster_users: nc_min exceeds user count");
    if (range.nc_max > U) range.nc_max = U;
    const std::size_t F = profiles[0].probs.size();

    // nc_min distinct random users as the first centroids
    Rng rng(seed);
    std::vector<std::size_t> pool(U);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<PopularityProfile> centroids;
    centroids.reserve(range.nc_min);
    for (std::size_t i = 0; i < range.nc_min; ++i) {
        const std::size_t j = i + rng.index(U - i);
        std::swap(pool[i], pool[j]);
        centroids.push_back(profiles[pool[i]]);
    }

    ClusterSearchResult result;
    double best_aic = std::numeric_limits<double>::infinity();
    std::size_t consecutive_increases = 0;
    for (std::size_t k = range.nc_min; k <= range.nc_max; ++k) {
        ClusterModel model = kmeans(profiles, centroids);
        score_model(model, profiles, F);
        result.trace.push_back({k, model.log_likelihood, model.aic});

        if (model.aic < best_aic) {
            best_aic = model.aic;
            consecutive_increases = 0;
            result.best = model;
        } else if (model.aic > best_aic) {
            ++consecutive_increases;
        }
        if (consecutive_increases >= patience || k == range.nc_max) break;

        // next centroid: the member farthest from its centroid inside the
        // non-empty cluster with the greatest variance
        std::size_t k_star = 0;
        double var_star = -1.0;
        for (std::size_t c = 0; c < model.num_clusters; ++c) {
            if (model.member_counts[c] == 0) continue;
            if (model.variances[c] > var_star) {
                var_star = model.variances[c];
                k_star = c;
            }
        }
        std::size_t u_star = 0;
        double d_star = -1.0;
        for (std::size_t u = 0; u < U; ++u) {
            if (model.assignment[u] != k_star) continue;
            double d2 = 0.0;
            const auto& p = profiles[u].probs;
            const auto& c = model.centroids[k_star].probs;
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double d = p[i] - c[i];
                d2 += d * d;
            }
            if (d2 > d_star) {
                d_star = d2;
                u_star = u;
            }
        }
        centroids = std::move(model.centroids);
        centroids.push_back(profiles[u_star]);
    }
    return result;
}

void write_aic_trace(std::ostream& out, std::span<const AicTracePoint> trace) {
    out << "num_clusters,log_likelihood,aic\n";
    out.precision(12);
    for (const auto& point : trace)
        out << point.num_clusters << "," << point.log_likelihood << "," << point.aic
            << "\n";
}

}  // namespace cachenet
