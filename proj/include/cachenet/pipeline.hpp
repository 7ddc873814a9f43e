#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cachenet/allocation.hpp"
#include "cachenet/analytics.hpp"
#include "cachenet/clustering.hpp"
#include "cachenet/config.hpp"
#include "cachenet/popularity.hpp"

namespace cachenet {

// One synthetic user population: the catalog, the generating ground truth
// and the per-user profiles.
struct Population {
    Catalog catalog;
    GroundTruth truth;
    std::vector<PopularityProfile> profiles;
};

Population generate_population(const Config& config, std::uint64_t seed);

// The catalog piece of generate_population: same sizes for the same seed,
// with the cache capacity tracking the config's eta. Lets sweeps over eta
// reuse generated profiles while the capacity moves.
Catalog catalog_for(const Config& config, std::uint64_t seed);

// Cluster memberships from the Voronoi cells of `num_clusters` random sites
// on the disc; used when the experiment wants spatially correlated demand.
std::vector<std::size_t> spatial_cluster_assignment(std::span<const Point> users,
                                                    std::size_t num_clusters,
                                                    double region_radius_km,
                                                    std::uint64_t seed);

// Hotspot user population: `num_clusters` sites uniform on the disc, each
// user scattered around its cluster's site with an isotropic Gaussian of the
// given standard deviation (resampled to stay on the disc). Memberships
// round-robin so every hotspot is populated.
struct HotspotPopulation {
    std::vector<Point> users;
    std::vector<std::size_t> per_user_cluster;
    std::vector<Point> sites;
};
HotspotPopulation sample_hotspot_users(std::size_t num_users, std::size_t num_clusters,
                                       double region_radius_km, double scatter_km,
                                       std::uint64_t seed);

// SBS positions for the hotspot deployment: a Poisson(density · area) count;
// a hotspot_fraction share of them is placed at the sites in round-robin
// order (with the user scatter), the rest uniformly on the disc.
std::vector<Point> sample_hotspot_sbs(double density, const RegionSpec& region,
                                      std::span<const Point> sites, double scatter_km,
                                      double hotspot_fraction, std::uint64_t seed);

// Scenario from an explicit clustering: per-cluster mean profiles pick the
// cache sets, the active density splits equally across clusters.
ClusteredScenario make_clustered_scenario(const Config& config,
                                          const Population& population,
                                          std::span<const std::size_t> assignment,
                                          std::size_t num_clusters, double lambda_s);

// Single-cluster baseline: the global mean profile picks one cache set that
// every SBS carries.
ClusteredScenario make_unclustered_scenario(const Config& config,
                                            const Population& population,
                                            double lambda_s);

// Quotas N'_sk = ceil(relaxation · λ_sk π R_n²) from an equal density split.
ClusterQuotas quotas_for(const Config& config, std::size_t num_clusters,
                         double lambda_s);

}  // namespace cachenet
