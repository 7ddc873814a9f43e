#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cachenet/clustering.hpp"
#include "cachenet/rng.hpp"
#include "oracles.hpp"

using namespace cachenet;

namespace {

// small blob population: `per_cluster` users around each of `k` corners
std::vector<PopularityProfile> blob_profiles(std::size_t k, std::size_t per_cluster,
                                             std::size_t files, double spread,
                                             std::uint64_t seed,
                                             std::vector<std::size_t>* labels = nullptr) {
    Rng rng(seed);
    std::vector<PopularityProfile> profiles;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> center(files);
        double norm = 0.0;
        for (double& v : center) norm += (v = rng.uniform(0.05, 1.0));
        for (double& v : center) v /= norm;
        for (std::size_t u = 0; u < per_cluster; ++u) {
            PopularityProfile p;
            p.probs.resize(files);
            double total = 0.0;
            for (std::size_t i = 0; i < files; ++i)
                total += (p.probs[i] = std::max(1e-9, center[i] + spread * rng.normal()));
            for (double& v : p.probs) v /= total;
            profiles.push_back(std::move(p));
            if (labels) labels->push_back(c);
        }
    }
    return profiles;
}

double wcss(std::span<const PopularityProfile> profiles, const ClusterModel& model) {
    double acc = 0.0;
    for (std::size_t u = 0; u < profiles.size(); ++u) {
        const auto& p = profiles[u].probs;
        const auto& c = model.centroids[model.assignment[u]].probs;
        for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - c[i]) * (p[i] - c[i]);
    }
    return acc;
}

}  // namespace

TEST_SUITE_BEGIN("clustering");

TEST_CASE("kmeans with one centroid returns the global mean") {
    const auto profiles = blob_profiles(3, 4, 5, 0.05, 21);
    std::vector<PopularityProfile> init = {profiles[0]};
    const ClusterModel model = kmeans(profiles, init);
    CHECK(model.num_clusters == 1);
    CHECK(model.member_counts[0] == profiles.size());
    for (std::size_t i = 0; i < 5; ++i) {
        double mean = 0.0;
        for (const auto& p : profiles) mean += p.probs[i];
        mean /= static_cast<double>(profiles.size());
        CHECK(model.centroids[0].probs[i] == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("kmeans separates well-spaced clouds and matches nearest-centroid checks") {
    std::vector<std::size_t> labels;
    // inter-cluster distance about 10x the intra-cluster spread
    const auto profiles = blob_profiles(2, 10, 6, 0.004, 22, &labels);
    std::vector<PopularityProfile> init = {profiles[0], profiles[10]};
    const ClusterModel model = kmeans(profiles, init);
    // agreement with ground truth up to permutation
    CHECK(model.assignment[0] != model.assignment[10]);
    for (std::size_t u = 0; u < profiles.size(); ++u)
        CHECK(model.assignment[u] ==
              (labels[u] == labels[0] ? model.assignment[0] : model.assignment[10]));
    // every user sits with its nearest centroid
    for (std::size_t u = 0; u < profiles.size(); ++u) {
        double best = 1e300;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < 2; ++k) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < 6; ++i) {
                const double d = profiles[u].probs[i] - model.centroids[k].probs[i];
                d2 += d * d;
            }
            if (d2 < best) {
                best = d2;
                best_k = k;
            }
        }
        CHECK(model.assignment[u] == best_k);
    }
}

TEST_CASE("identical profiles collapse into one occupied cluster") {
    std::vector<PopularityProfile> profiles(6);
    for (auto& p : profiles) p.probs = {0.5, 0.3, 0.2};
    std::vector<PopularityProfile> init = {profiles[0], profiles[1]};
    ClusterModel model = kmeans(profiles, init);
    CHECK(model.member_counts[0] == 6);
    CHECK(model.member_counts[1] == 0);
    score_model(model, profiles, 3);
    CHECK(model.variances[0] == kVarianceFloor);
}

TEST_CASE("kmeans never increases the within-cluster sum of squares") {
    const auto profiles = blob_profiles(3, 8, 5, 0.05, 23);
    std::vector<PopularityProfile> init = {profiles[0], profiles[5], profiles[17]};
    double prev = 1e300;
    for (std::size_t iters = 1; iters <= 8; ++iters) {
        const ClusterModel model = kmeans(profiles, init, iters);
        const double value = wcss(profiles, model);
        CHECK(value <= prev * (1.0 + 1e-12));
        prev = value;
    }
}

TEST_CASE("cluster variance matches hand arithmetic and floors at zero") {
    std::vector<PopularityProfile> profiles(2);
    profiles[0].probs = {0.6, 0.4};
    profiles[1].probs = {0.4, 0.6};
    PopularityProfile centroid;
    centroid.probs = {0.5, 0.5};
    const std::size_t both[] = {0, 1};
    CHECK(cluster_variance(profiles, both, centroid) ==
          doctest::Approx(0.02).epsilon(1e-12));

    const std::size_t one[] = {0};
    CHECK(cluster_variance(profiles, one, profiles[0]) == kVarianceFloor);

    std::vector<PopularityProfile> copies(3);
    for (auto& p : copies) p.probs = centroid.probs;
    const std::size_t all[] = {0, 1, 2};
    CHECK(cluster_variance(copies, all, centroid) == kVarianceFloor);
    CHECK_THROWS_AS(
        cluster_variance(profiles, std::span<const std::size_t>{}, centroid),
        std::invalid_argument);
}

TEST_CASE("log likelihood of one two-user cluster matches the per-user sum") {
    std::vector<PopularityProfile> profiles(2);
    profiles[0].probs = {0.6, 0.4};
    profiles[1].probs = {0.4, 0.6};
    std::vector<PopularityProfile> init(1);
    init[0].probs = {0.5, 0.5};
    ClusterModel model = kmeans(profiles, init);
    score_model(model, profiles, 2);
    // frozen from the per-user form: -(log 2pi + 1 + 2 log 0.02)
    CHECK(model.log_likelihood == doctest::Approx(4.986168944446947).epsilon(1e-12));
    CHECK(log_likelihood(model, 2, 2) ==
          doctest::Approx(oracles::per_user_log_likelihood(profiles, model))
              .epsilon(1e-12));
    // AIC identity: 2k - 2 logL with k = 1 * (F + 1)
    CHECK(model.aic == doctest::Approx(-3.972337888893894).epsilon(1e-12));
    CHECK(model.aic - 2.0 * static_cast<double>(model.num_params) +
              2.0 * model.log_likelihood ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("grouped likelihood equals the per-user oracle on random instances") {
    Rng rng(404);
    for (int t = 0; t < 15; ++t) {
        const std::size_t k = 1 + rng.index(4);
        const std::size_t files = 2 + rng.index(9);
        const auto profiles =
            blob_profiles(k, 2 + rng.index(5), files, 0.03, rng.bits());
        std::vector<PopularityProfile> init;
        for (std::size_t c = 0; c < k; ++c) init.push_back(profiles[c]);
        ClusterModel model = kmeans(profiles, init);
        bool empty = false;
        for (std::size_t c = 0; c < k; ++c)
            if (model.member_counts[c] == 0) empty = true;
        if (empty) continue;
        score_model(model, profiles, files);
        const double oracle = oracles::per_user_log_likelihood(profiles, model);
        CHECK(std::fabs(model.log_likelihood - oracle) <= 1e-6);
    }
}

TEST_CASE("log likelihood rejects empty clusters") {
    ClusterModel model;
    model.num_clusters = 2;
    model.member_counts = {3, 0};
    model.variances = {0.1, 0.1};
    CHECK_THROWS_AS(log_likelihood(model, 3, 2), std::invalid_argument);
}

TEST_CASE("the AIC penalty grows linearly in the cluster count") {
    ClusterModel model;
    model.log_likelihood = -12.5;
    model.num_params = 3 * (4 + 1);
    const double base = aic_score(model);
    model.num_params = 6 * (4 + 1);
    CHECK(aic_score(model) - base == doctest::Approx(2.0 * 3 * 5).epsilon(1e-12));
}

TEST_CASE("cluster search over a degenerate range returns one cluster") {
    const auto profiles = blob_profiles(2, 5, 4, 0.02, 31);
    const ClusterSearchResult result = cluster_users(profiles, {1, 1}, 7);
    CHECK(result.best.num_clusters == 1);
    CHECK(result.trace.size() == 1);
}

TEST_CASE("noise-free truth is recovered exactly and is the range-wide minimum") {
    // three point-clusters; beyond k*=3 the likelihood cannot improve while
    // the parameter penalty keeps growing
    std::vector<PopularityProfile> profiles;
    std::vector<std::vector<double>> centers = {
        {0.7, 0.2, 0.1}, {0.1, 0.7, 0.2}, {0.2, 0.1, 0.7}};
    for (int copy = 0; copy < 5; ++copy)
        for (const auto& center : centers) {
            PopularityProfile p;
            p.probs = center;
            profiles.push_back(p);
        }
    // large patience forces a scan of the whole range
    const ClusterSearchResult full = cluster_users(profiles, {1, 8}, 3, 99);
    CHECK(full.trace.size() == 8);
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < full.trace.size(); ++i)
        if (full.trace[i].aic < full.trace[argmin].aic) argmin = i;
    CHECK(full.trace[argmin].num_clusters == 3);
    CHECK(full.best.num_clusters == 3);

    // default patience stops early yet returns the same model
    const ClusterSearchResult early = cluster_users(profiles, {1, 8}, 3);
    CHECK(early.best.num_clusters == 3);
    CHECK(early.trace.size() < 8);
}

TEST_CASE("the returned model minimizes AIC over the visited sequence") {
    const auto profiles = blob_profiles(4, 6, 6, 0.01, 33);
    const ClusterSearchResult result = cluster_users(profiles, {2, 10}, 5);
    for (const AicTracePoint& point : result.trace)
        CHECK(result.best.aic <= point.aic + 1e-12);
}

TEST_CASE("search range validation") {
    const auto profiles = blob_profiles(2, 2, 3, 0.02, 35);
    CHECK_THROWS_AS(cluster_users(profiles, {5, 4}, 1), std::invalid_argument);
    CHECK_THROWS_AS(cluster_users(profiles, {9, 9}, 1), std::invalid_argument);
}

TEST_SUITE_END();
