#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cachenet {

// File catalog with per-file sizes and the per-SBS cache capacity M.
struct Catalog {
    std::vector<double> file_sizes_bits;  // L_i
    double cache_capacity_bits = 0.0;     // M

    std::size_t num_files() const { return file_sizes_bits.size(); }
    double total_size_bits() const;
    double normalized_cache_size() const;  // η = M / ΣL_i
    void validate() const;
};

// Per-user request distribution over the catalog; entries sum to 1.
struct PopularityProfile {
    std::vector<double> probs;
};

// Synthetic generator state: each cluster owns a popularity-rank ordering of
// the catalog, and every user belongs to one cluster.
struct GroundTruth {
    std::size_t true_num_clusters = 0;
    std::vector<std::size_t> per_user_cluster;
    std::vector<std::vector<std::uint32_t>> orderings;  // orderings[c][rank] = file
};

// Cached file set Δ of one cluster. Sets of different clusters may overlap.
struct CacheSet {
    std::vector<std::uint32_t> files;  // ascending
    double total_size_bits = 0.0;
};

// Zipf pmf over n ranks: p_r ∝ r^{-s}.
std::vector<double> zipf_pmf(std::size_t n, double exponent);

// Catalog with sizes uniform in [min_size, max_size] and M = eta · ΣL.
Catalog make_catalog(std::size_t num_files, double min_size_bits, double max_size_bits,
                     double eta, std::uint64_t seed);

// Uniformly random cluster memberships. Each cluster ranks the catalog by
// (1 − ordering_correlation) · cluster-private score + ordering_correlation ·
// shared global score: 0 gives independent uniform permutations, 1 makes all
// clusters agree on one global popularity order.
GroundTruth make_ground_truth(std::size_t num_clusters, std::size_t num_users,
                              std::size_t num_files, std::uint64_t seed,
                              double ordering_correlation = 0.0);

// User u's profile blends the Zipf pmf permuted by its cluster's ordering
// with the same pmf under a personal uniform ordering:
//   P_u = (1 − noise) · zipf[cluster] + noise · zipf[personal].
// noise = 0 makes all members of a cluster identical; the result is an exact
// pmf for any noise in [0, 1].
std::vector<PopularityProfile> generate_profiles(const Catalog& catalog,
                                                 const GroundTruth& truth,
                                                 double zipf_exponent, double noise,
                                                 std::uint64_t seed);

// Coordinate-wise mean of the members' profiles.
PopularityProfile cluster_mean_profile(std::span<const PopularityProfile> profiles,
                                       std::span<const std::size_t> members);

// Greedy cache fill: scan files by decreasing mean popularity (ties broken by
// lower index), add each file that still fits in the residual capacity, skip
// files that do not fit and keep scanning.
CacheSet select_cache_set(const PopularityProfile& mean_profile, const Catalog& catalog);

// Σ_{i∈Δ} p_i — the probability mass a profile places on a cache set.
double cached_mass(const PopularityProfile& profile, const CacheSet& cache);

// Columnar text formats: catalog as "index size_bits" rows, profiles as one
// row of F probabilities per user.
void write_catalog(std::ostream& out, const Catalog& catalog);
Catalog read_catalog(std::istream& in);
void write_profiles(std::ostream& out, std::span<const PopularityProfile> profiles);
std::vector<PopularityProfile> read_profiles(std::istream& in);

}  // namespace cachenet
