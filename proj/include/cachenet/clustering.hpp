#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cachenet/popularity.hpp"

namespace cachenet {

// log(σ̂²) is undefined at zero variance, which identical profiles produce;
// degenerate clusters are floored here so they stay scoreable.
inline constexpr double kVarianceFloor = 1e-12;

// A fitted Gaussian-mixture-style model of the profile population: hard
// K-means assignments plus per-cluster mean and variance, scored by AIC.
struct ClusterModel {
    std::size_t num_clusters = 0;
    std::vector<PopularityProfile> centroids;
    std::vector<std::size_t> assignment;     // user -> cluster
    std::vector<std::size_t> member_counts;  // U_k
    std::vector<double> variances;           // σ̂²_k, floored
    std::vector<double> sum_squared_distances;  // Σ_{u∈k} ‖P_u − P̂_k‖²
    double log_likelihood = 0.0;
    double aic = 0.0;
    std::size_t num_params = 0;  // N_i · (F + 1)
};

struct SearchRange {
    std::size_t nc_min = 1;
    std::size_t nc_max = 1;
};

// Lloyd iterations on Euclidean distance. Stops when the assignment is
// stable, the largest centroid displacement drops below tol, or max_iters is
// reached. Distance ties resolve to the lower cluster index. A cluster that
// empties is reseeded with the profile farthest from its current centroid;
// if every profile sits exactly on its centroid the cluster stays empty
// (identical-input degenerate case).
ClusterModel kmeans(std::span<const PopularityProfile> profiles,
                    std::vector<PopularityProfile> initial_centroids,
                    std::size_t max_iters = 300, double tol = 1e-9);

// (1/U_k) Σ_{j∈members} ‖P_j − centroid‖², floored at kVarianceFloor.
double cluster_variance(std::span<const PopularityProfile> profiles,
                        std::span<const std::size_t> members,
                        const PopularityProfile& centroid);

// Hard-assignment Gaussian-mixture log likelihood, grouped per cluster:
//   Σ_k −(U_k/2) · ( log(2π) + 1 − 2·log(U_k/U) + F·log(σ̂²_k) ).
// Equals the per-user sum of member log densities plus log cluster weights.
// The quadratic term is carried as Σ‖P_u − P̂_k‖² / (2σ̂²_k) — identical to
// the U_k/2 above whenever σ̂²_k is the unfloored empirical variance, and
// still exact when the variance floor is in effect. Throws if any cluster is
// empty.
double log_likelihood(const ClusterModel& model, std::size_t num_users,
                      std::size_t num_files);

// AIC = 2·num_params − 2·log_likelihood. Requires score fields to be set.
double aic_score(const ClusterModel& model);

// Fills variances, num_params, log_likelihood and aic in place. Empty
// clusters contribute zero likelihood (the U_k → 0 limit) while the
// parameter penalty still counts all requested clusters. Singleton clusters
// take the pooled variance of the multi-member clusters: their own MLE
// variance is zero and would otherwise reward the model with an unbounded
// density spike, driving the cluster-count search to the cap.
void score_model(ClusterModel& model, std::span<const PopularityProfile> profiles,
                 std::size_t num_files);

struct AicTracePoint {
    std::size_t num_clusters;
    double log_likelihood;
    double aic;
};

struct ClusterSearchResult {
    ClusterModel best;
    std::vector<AicTracePoint> trace;
};

// Cluster-count search: start from nc_min random distinct user profiles as
// centroids; at each step run K-means, score AIC, then add a centroid at the
// member farthest from its centroid inside the highest-variance cluster.
// Stops after `patience` consecutive AIC values above the running minimum or
// at nc_max, and returns the AIC-minimizing model seen.
ClusterSearchResult cluster_users(std::span<const PopularityProfile> profiles,
                                  SearchRange range, std::uint64_t seed,
                                  std::size_t patience = 2);

// CSV rows "K,log_likelihood,aic" with a header naming the columns.
void write_aic_trace(std::ostream& out, std::span<const AicTracePoint> trace);

}  // namespace cachenet
