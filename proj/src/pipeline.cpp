#include "cachenet/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "cachenet/rng.hpp"

namespace cachenet {

namespace {

constexpr double kBitsPerMb = 8.0 * 1024.0 * 1024.0;

}  // namespace

Catalog catalog_for(const Config& config, std::uint64_t seed) {
    return make_catalog(config.num_files, config.min_file_size_mb * kBitsPerMb,
                        config.max_file_size_mb * kBitsPerMb, config.eta,
                        substream_seed(seed, 11));
}

Population generate_population(const Config& config, std::uint64_t seed) {
    Population population;
    population.catalog = catalog_for(config, seed);
    population.truth = make_ground_truth(config.true_clusters, config.num_users(),
                                         config.num_files, substream_seed(seed, 12),
                                         config.ordering_correlation);
    population.profiles =
        generate_profiles(population.catalog, population.truth, config.zipf_exponent,
                          config.profile_noise, substream_seed(seed, 13));
    return population;
}

std::vector<std::size_t> spatial_cluster_assignment(std::span<const Point> users,
                                                    std::size_t num_clusters,
                                                    double region_radius_km,
                                                    std::uint64_t seed) {
    if (num_clusters == 0)
        throw std::invalid_argument("spatial_cluster_assignment: no clusters");
    Rng rng(seed);
    std::vector<Point> sites(num_clusters);
    for (Point& site : sites) {
        const double r = region_radius_km * std::sqrt(rng.uniform());
        const double phi = 2.0 * kPi * rng.uniform();
        site = {r * std::cos(phi), r * std::sin(phi)};
    }
    std::vector<std::size_t> assignment(users.size());
    for (std::size_t u = 0; u < users.size(); ++u) {
        std::size_t best = 0;
        double best_d = distance(users[u], sites[0]);
        for (std::size_t k = 1; k < num_clusters; ++k) {
            const double d = distance(users[u], sites[k]);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        assignment[u] = best;
    }
    return assignment;
}

HotspotPopulation sample_hotspot_users(std::size_t num_users, std::size_t num_clusters,
                                       double region_radius_km, double scatter_km,
                                       std::uint64_t seed) {
    if (num_clusters == 0)
        throw std::invalid_argument("sample_hotspot_users: no clusters");
    Rng rng(seed);
    HotspotPopulation population;
    population.sites.resize(num_clusters);
    for (Point& site : population.sites) {
        const double r = region_radius_km * std::sqrt(rng.uniform());
        const double phi = 2.0 * kPi * rng.uniform();
        site = {r * std::cos(phi), r * std::sin(phi)};
    }
    population.users.resize(num_users);
    population.per_user_cluster.resize(num_users);
    for (std::size_t u = 0; u < num_users; ++u) {
        const std::size_t c = u % num_clusters;
        population.per_user_cluster[u] = c;
        Point p;
        for (int attempt = 0;; ++attempt) {
            p = {population.sites[c].x + scatter_km * rng.normal(),
                 population.sites[c].y + scatter_km * rng.normal()};
            if (std::hypot(p.x, p.y) <= region_radius_km || attempt >= 32) break;
        }
        population.users[u] = p;
    }
    return population;
}

std::vector<Point> sample_hotspot_sbs(double density, const RegionSpec& region,
                                      std::span<const Point> sites, double scatter_km,
                                      double hotspot_fraction, std::uint64_t seed) {
    if (sites.empty()) throw std::invalid_argument("sample_hotspot_sbs: no sites");
    Rng rng(seed);
    const long count = rng.poisson(density * region.area_km2());
    std::vector<Point> sbs;
    sbs.reserve(static_cast<std::size_t>(count));
    std::size_t next_site = 0;  // hotspot-deployed SBSs cycle through sites
    for (long i = 0; i < count; ++i) {
        Point p;
        if (rng.uniform() < hotspot_fraction) {
            const Point& site = sites[next_site++ % sites.size()];
            for (int attempt = 0;; ++attempt) {
                p = {site.x + scatter_km * rng.normal(),
                     site.y + scatter_km * rng.normal()};
                if (std::hypot(p.x, p.y) <= region.radius_km || attempt >= 32) break;
            }
        } else {
            const double r = region.radius_km * std::sqrt(rng.uniform());
            const double phi = 2.0 * kPi * rng.uniform();
            p = {r * std::cos(phi), r * std::sin(phi)};
        }
        sbs.push_back(p);
    }
    return sbs;
}

ClusteredScenario make_clustered_scenario(const Config& config,
                                          const Population& population,
                                          std::span<const std::size_t> assignment,
                                          std::size_t num_clusters, double lambda_s) {
    if (assignment.size() != population.profiles.size())
        throw std::invalid_argument("make_clustered_scenario: assignment size mismatch");
    ClusteredScenario scenario;
    scenario.profiles = population.profiles;
    scenario.assignment.assign(assignment.begin(), assignment.end());
    scenario.region = config.region();
    scenario.channel = config.channel();
    scenario.power = config.power();

    std::vector<std::vector<std::size_t>> members(num_clusters);
    for (std::size_t u = 0; u < assignment.size(); ++u)
        members[assignment[u]].push_back(u);

    scenario.cache_sets.resize(num_clusters);
    const PopularityProfile global_mean = [&] {
        std::vector<std::size_t> everyone(population.profiles.size());
        for (std::size_t u = 0; u < everyone.size(); ++u) everyone[u] = u;
        return cluster_mean_profile(population.profiles, everyone);
    }();
    for (std::size_t k = 0; k < num_clusters; ++k) {
        // an unpopulated cluster caches by the global mean; it has no users
        // to average and receives no density below
        const PopularityProfile mean =
            members[k].empty() ? global_mean
                               : cluster_mean_profile(population.profiles, members[k]);
        scenario.cache_sets[k] = select_cache_set(mean, population.catalog);
    }

    scenario.densities.per_cluster.assign(num_clusters,
                                          lambda_s / static_cast<double>(num_clusters));
    scenario.validate();
    return scenario;
}

ClusteredScenario make_unclustered_scenario(const Config& config,
                                            const Population& population,
                                            double lambda_s) {
    std::vector<std::size_t> assignment(population.profiles.size(), 0);
    return make_clustered_scenario(config, population, assignment, 1, lambda_s);
}

ClusterQuotas quotas_for(const Config& config, std::size_t num_clusters,
                         double lambda_s) {
    const double area = config.region().area_km2();
    const double n_sk = lambda_s / static_cast<double>(num_clusters) * area;
    ClusterQuotas quotas;
    quotas.per_cluster.assign(num_clusters,
                              static_cast<int>(std::ceil(config.quota_relaxation * n_sk)));
    return quotas;
}

}  // namespace cachenet
