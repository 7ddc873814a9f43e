// Acceptance suite: end-to-end checks of the shipped defaults against the
// reference behaviors, one pass/fail line per criterion. Run with no
// arguments for everything, or pass criterion numbers to select.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "cachenet/allocation.hpp"
#include "cachenet/clustering.hpp"
#include "cachenet/density_opt.hpp"
#include "cachenet/experiment.hpp"
#include "cachenet/montecarlo.hpp"
#include "cachenet/pipeline.hpp"
#include "cachenet/rng.hpp"
#include "cachenet/special.hpp"
#include "oracles.hpp"

using namespace cachenet;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& description,
            const std::string& details) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                description.c_str(), details.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof buffer, format, args);
    va_end(args);
    return buffer;
}

// trace must descend into a unique global minimum and ascend after it
bool u_shaped(const std::vector<AicTracePoint>& trace) {
    if (trace.size() < 2) return true;
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i].aic < trace[argmin].aic) argmin = i;
    for (std::size_t i = 0; i + 1 <= argmin; ++i)
        if (!(trace[i].aic > trace[i + 1].aic)) return false;
    for (std::size_t i = argmin; i + 1 < trace.size(); ++i)
        if (!(trace[i].aic < trace[i + 1].aic)) return false;
    return true;
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
    const int seeds = 20;
    bool pass = true;
    std::string details;
    for (std::size_t truth : {10u, 15u, 20u}) {
        const auto start = std::chrono::steady_clock::now();
        Config config;
        config.true_clusters = truth;
        config.profile_noise = 0.1;  // low intra-cluster noise
        int recovered = 0;
        int shaped = 0;
        for (int seed = 1; seed <= seeds; ++seed) {
            const Population population = generate_population(config, seed);
            const ClusterSearchResult result =
                cluster_users(population.profiles, {5, 30}, substream_seed(seed, 21),
                              config.patience);
            if (result.best.num_clusters == truth) ++recovered;
            if (u_shaped(result.trace)) ++shaped;
        }
        const double seconds = elapsed_s(start);
        details += fmt("K*=%zu: %d/%d recovered, %d/%d U-shaped, %.1fs; ", truth,
                       recovered, seeds, shaped, seeds, seconds);
        if (recovered < 16 || shaped < seeds || seconds >= 120.0) pass = false;
    }
    report(1, pass, "AIC cluster-count recovery at truths 10/15/20", details);
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
    Config config;
    config.comm_radius_km = 0.9;
    config.active_sbs_density = 1.0;
    config.eta = 0.25;
    const int seeds = 20;
    double clustered_sum = 0.0, unclustered_sum = 0.0;
    bool dominance = true;
    for (int seed = 1; seed <= seeds; ++seed) {
        const Population population = generate_population(config, seed);
        const ClusterSearchResult search =
            cluster_users(population.profiles, {config.search_min, config.search_max},
                          substream_seed(seed, 21), config.patience);
        const ClusteredScenario clustered = make_clustered_scenario(
            config, population, search.best.assignment, search.best.num_clusters,
            config.active_sbs_density);
        const ClusteredScenario unclustered =
            make_unclustered_scenario(config, population, config.active_sbs_density);
        const double hit_c = hit_probability(clustered).raw;
        const double hit_u = hit_probability(unclustered).clamped;
        clustered_sum += hit_c;
        unclustered_sum += hit_u;
        if (!(hit_c > hit_u)) dominance = false;
    }
    const double mean_c = clustered_sum / seeds;
    const double mean_u = unclustered_sum / seeds;
    const bool pass = mean_c >= 0.65 && mean_c <= 0.82 && mean_u >= 0.33 &&
                      mean_u <= 0.49 && dominance;
    report(2, pass, "hit-probability gap at R=0.9, lambda_s=1, eta=0.25",
           fmt("clustered mean %.4f in [0.65,0.82], unclustered mean %.4f in "
               "[0.33,0.49], per-seed dominance %s",
               mean_c, mean_u, dominance ? "yes" : "no"));
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
    Config config;
    config.eta = 0.4;
    const int seeds = 10;
    double mean16 = 0.0, mean19 = 0.0;
    bool in_window = true, positive = true;
    for (int seed = 1; seed <= seeds; ++seed) {
        const Population population = generate_population(config, seed);
        const ClusterSearchResult search =
            cluster_users(population.profiles, {config.search_min, config.search_max},
                          substream_seed(seed, 21), config.patience);
        for (double lambda_s : {1.6, 1.9}) {
            const ClusteredScenario clustered = make_clustered_scenario(
                config, population, search.best.assignment, search.best.num_clusters,
                lambda_s);
            const ClusteredScenario unclustered =
                make_unclustered_scenario(config, population, lambda_s);
            const double gain =
                (energy_efficiency(clustered) / energy_efficiency(unclustered) - 1.0) *
                100.0;
            if (gain <= 0.0) positive = false;
            if (lambda_s == 1.6) {
                mean16 += gain / seeds;
                if (gain < 12.5 - 8.0 || gain > 12.5 + 8.0) in_window = false;
            } else {
                mean19 += gain / seeds;
                if (gain < 14.2 - 8.0 || gain > 14.2 + 8.0) in_window = false;
            }
        }
    }
    const bool monotone = mean19 >= mean16;
    const bool pass = positive && in_window && monotone;
    report(3, pass, "clustered EE gain vs unclustered at eta=0.4",
           fmt("gain(1.6)=%.2f%% (target 12.5+-8), gain(1.9)=%.2f%% (target 14.2+-8), "
               "positive %s, monotone %s",
               mean16, mean19, positive ? "yes" : "no", monotone ? "yes" : "no"));
}

// ---------------------------------------------------------------- criterion 4
void criterion_4() {
    Config config;
    config.active_sbs_density = 1.9;
    config.eta = 0.4;
    config.true_clusters = 15;
    config.profile_noise = 0.02;
    config.ordering_correlation = 0.0;
    config.comm_radius_km = 0.35;
    const int seeds = 20;
    const RegionSpec region = config.region();
    double gain_sum = 0.0;
    bool dominance = true;
    int runs = 0;
    for (int seed = 1; seed <= seeds; ++seed) {
        const HotspotPopulation hotspots = sample_hotspot_users(
            config.num_users(), config.true_clusters, region.radius_km,
            config.hotspot_scatter_km, substream_seed(seed, 31));
        NetworkSnapshot snapshot;
        snapshot.users = hotspots.users;
        snapshot.sbs = sample_hotspot_sbs(config.active_sbs_density, region,
                                          hotspots.sites, config.hotspot_scatter_km,
                                          config.sbs_hotspot_fraction,
                                          substream_seed(seed, 32));
        if (snapshot.sbs.empty()) continue;
        Population population;
        population.catalog = generate_population(config, seed).catalog;
        population.truth.true_num_clusters = config.true_clusters;
        population.truth.per_user_cluster = hotspots.per_user_cluster;
        population.truth.orderings =
            make_ground_truth(config.true_clusters, 0, config.num_files,
                              substream_seed(seed, 34), config.ordering_correlation)
                .orderings;
        population.profiles =
            generate_profiles(population.catalog, population.truth,
                              config.zipf_exponent, config.profile_noise,
                              substream_seed(seed, 35));
        const ClusteredScenario scenario = make_clustered_scenario(
            config, population, population.truth.per_user_cluster,
            config.true_clusters, config.active_sbs_density);
        const ClusterQuotas quotas =
            quotas_for(config, config.true_clusters, config.active_sbs_density);
        const EeGainResult result =
            allocation_ee_gain(snapshot, scenario, quotas, substream_seed(seed, 36));
        if (!(result.ee_optimized > result.ee_random)) dominance = false;
        gain_sum += result.gain() * 100.0;
        ++runs;
    }
    const double mean_gain = gain_sum / std::max(runs, 1);
    const bool pass = dominance && mean_gain >= 20.0 && runs == seeds;
    report(4, pass, "greedy allocation EE gain over random at lambda_s=1.9, eta=0.4",
           fmt("mean gain %.1f%% (>= 20), greedy beats random on %s seeds (%d runs)",
               mean_gain, dominance ? "all" : "NOT all", runs));
}

// ---------------------------------------------------------------- criterion 5
void criterion_5() {
    const auto start = std::chrono::steady_clock::now();
    Config base;
    bool pass = true;
    std::string details;
    double worst_cov = 0.0, worst_pow = 0.0, worst_total = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Config config = random_desk_config(seed, base);
        const Population population = generate_population(config, seed);
        const ClusteredScenario scenario = make_clustered_scenario(
            config, population, population.truth.per_user_cluster,
            config.true_clusters, config.active_sbs_density);

        SimConfig sim;
        sim.scenario = scenario;
        sim.threads = 0;
        // the far-field tail of the interference integral decays like
        // D^(2-alpha); 12 region radii keep it inside the 2% budget for the
        // desk exponents
        sim.interferer_disc_multiplier = 12.0;

        sim.num_realizations = 100000;
        sim.seed = substream_seed(seed, 41);
        const double cov_formula = coverage_probability(
            scenario.densities, scenario.channel, scenario.region.comm_radius_km);
        const double cov_err =
            std::fabs(simulate_coverage(sim).mean - cov_formula);
        worst_cov = std::max(worst_cov, cov_err);

        const double lambda_sk = scenario.densities.per_cluster[0];
        const double power_formula = mean_nearest_tx_power(
            lambda_sk, scenario.channel, scenario.region.comm_radius_km);
        const SimEstimate power_sim = simulate_mean_nearest_tx_power(
            lambda_sk, scenario.channel, scenario.region.comm_radius_km, 1000000,
            substream_seed(seed, 42));
        const double power_err = std::fabs(power_sim.mean - power_formula) / power_formula;
        worst_pow = std::max(worst_pow, power_err);

        sim.num_realizations = 100000;
        sim.seed = substream_seed(seed, 43);
        const double total_formula = total_power_cached(scenario);
        const double total_err =
            std::fabs(simulate_total_power(sim).mean - total_formula) / total_formula;
        worst_total = std::max(worst_total, total_err);

        if (cov_err > 0.02 || power_err > 0.01 || total_err > 0.02) pass = false;
    }
    const double seconds = elapsed_s(start);
    if (seconds >= 300.0) pass = false;
    report(5, pass, "closed forms match Monte Carlo oracles on 5 desk configs",
           fmt("worst |coverage err| %.4f (<=0.02), worst mean-power rel err %.4f "
               "(<=0.01), worst total-power rel err %.4f (<=0.02), %.0fs (<300)",
               worst_cov, worst_pow, worst_total, seconds));
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
    Rng rng(606);
    long trials = 0, violations = 0, monotonicity = 0;
    for (int instance = 0; instance < 20; ++instance) {
        NetworkSnapshot snapshot;
        const std::size_t users = 6 + rng.index(12);
        const std::size_t sbs = 4 + rng.index(5);
        for (std::size_t u = 0; u < users; ++u)
            snapshot.users.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
        for (std::size_t s = 0; s < sbs; ++s)
            snapshot.sbs.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
        ChannelParams channel;
        channel.pathloss_exponent = rng.uniform(2.2, 3.2);
        channel.target_rx_power_w = 0.12589254117941673;
        channel.noise_power_w = 1e-13;
        channel.sinr_threshold = 0.1;
        const LinkWeights weights = build_weights(snapshot, channel, 1.0);

        const std::size_t files = 4 + rng.index(6);
        const std::size_t clusters = 2 + rng.index(2);
        std::vector<PopularityProfile> profiles(users);
        for (auto& profile : profiles) {
            profile.probs.resize(files);
            double norm = 0.0;
            for (double& p : profile.probs) norm += (p = rng.uniform(0.01, 1.0));
            for (double& p : profile.probs) p /= norm;
        }
        std::vector<CacheSet> cache_sets(clusters);
        for (auto& cache : cache_sets)
            for (std::uint32_t f = 0; f < files; ++f)
                if (rng.uniform() < 0.4) cache.files.push_back(f);

        const SubmodularityReport report_ = submodularity_check(
            weights, profiles, cache_sets, 500, rng.bits());
        trials += report_.trials;
        violations += report_.violations;
        monotonicity += report_.monotonicity_violations;
    }
    const bool pass = violations == 0 && monotonicity == 0 && trials >= 9000;
    report(6, pass, "submodularity and monotonicity of the allocation objective",
           fmt("%ld nested-pair trials, %ld diminishing-returns violations, %ld "
               "monotonicity violations",
               trials, violations, monotonicity));
}

// ---------------------------------------------------------------- criterion 7
void criterion_7() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(707);
    int instances = 0;
    double ratio_sum = 0.0, worst_ratio = 1.0;
    bool pass = true;
    while (instances < 100) {
        NetworkSnapshot snapshot;
        const std::size_t users = 4 + rng.index(17);   // <= 20
        const std::size_t sbs = 2 + rng.index(7);      // <= 8
        const std::size_t clusters = 1 + rng.index(3); // <= 3
        for (std::size_t u = 0; u < users; ++u)
            snapshot.users.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
        for (std::size_t s = 0; s < sbs; ++s)
            snapshot.sbs.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
        ChannelParams channel;
        channel.pathloss_exponent = 2.5;
        channel.target_rx_power_w = 0.12589254117941673;
        channel.noise_power_w = 1e-13;
        channel.sinr_threshold = 0.1;
        const LinkWeights weights = build_weights(snapshot, channel, 1.0);

        const std::size_t files = 5 + rng.index(6);
        std::vector<PopularityProfile> profiles(users);
        for (auto& profile : profiles) {
            profile.probs.resize(files);
            double norm = 0.0;
            for (double& p : profile.probs) norm += (p = rng.uniform(0.01, 1.0));
            for (double& p : profile.probs) p /= norm;
        }
        std::vector<CacheSet> cache_sets(clusters);
        for (auto& cache : cache_sets)
            for (std::uint32_t f = 0; f < files; ++f)
                if (rng.uniform() < 0.45) cache.files.push_back(f);
        ClusterQuotas quotas;
        quotas.per_cluster.resize(clusters);
        for (int& q : quotas.per_cluster) q = 1 + static_cast<int>(rng.index(sbs));

        const AllocationMatrix greedy =
            greedy_allocate(weights, profiles, cache_sets, quotas);
        const AllocationMatrix brute =
            brute_force_allocate(weights, profiles, cache_sets, quotas);
        const double g = allocation_objective(greedy, weights, profiles, cache_sets);
        const double b = allocation_objective(brute, weights, profiles, cache_sets);
        if (b <= 0.0) continue;  // nothing reachable, skip degenerate draw
        ++instances;
        const double ratio = g / b;
        ratio_sum += ratio;
        worst_ratio = std::min(worst_ratio, ratio);
        if (ratio < 0.5 - 1e-12) pass = false;
    }
    const double mean_ratio = ratio_sum / instances;
    const double seconds = elapsed_s(start);
    if (mean_ratio < 0.9 || seconds >= 180.0) pass = false;
    report(7, pass, "greedy vs brute force on 100 micro instances",
           fmt("worst ratio %.3f (>=0.5), mean ratio %.3f (>=0.9), %.0fs (<180)",
               worst_ratio, mean_ratio, seconds));
}

// ---------------------------------------------------------------- criterion 8
void criterion_8() {
    // quasi-concavity probe on three desk configurations
    bool pass = true;
    std::string details;
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        Config base;
        const Config config = random_desk_config(seed, base);
        const Population population = generate_population(config, seed);
        const ClusteredScenario scenario = make_clustered_scenario(
            config, population, population.truth.per_user_cluster,
            config.true_clusters, config.active_sbs_density);
        DensityProblem problem(scenario, config.sbs_density_max);
        const UnimodalityReport probe = unimodality_probe(problem, 50, seed);
        details += fmt("desk %llu: %d/50 lines, %d violations; ",
                       static_cast<unsigned long long>(seed), probe.lines_probed,
                       probe.violations);
        if (probe.violations != 0 || probe.lines_probed < 50) pass = false;
    }

    // two-cluster solver vs an exhaustive grid
    Config config;
    config.user_density = 6.0;
    config.num_files = 80;
    config.true_clusters = 2;
    config.profile_noise = 0.1;
    config.ordering_correlation = 0.0;
    config.sinr_threshold = 1.0;  // strong interference puts the peak inside
    config.eta = 0.25;
    const Population population = generate_population(config, 5);
    const ClusteredScenario scenario = make_clustered_scenario(
        config, population, population.truth.per_user_cluster, 2, 1.0);
    DensityProblem problem(scenario, config.sbs_density_max);
    const OptResult solved =
        solve_density(problem, feasible_init(problem), {}, 4000, 1e-7);

    double grid_best = 0.0;
    DensityVector probe_point;
    probe_point.per_cluster = {0.0, 0.0};
    for (int i = 1; i <= 100; ++i) {
        for (int j = 1; j <= 100; ++j) {
            probe_point.per_cluster[0] = config.sbs_density_max * i / 100.0;
            probe_point.per_cluster[1] = config.sbs_density_max * j / 100.0;
            if (probe_point.total() > config.sbs_density_max) continue;
            if (problem.budget_constraint(probe_point) > 0.0) continue;
            grid_best = std::max(grid_best, problem.objective(probe_point));
        }
    }
    const double rel = std::fabs(solved.ee_value - grid_best) / grid_best;
    details += fmt("2-cluster solver EE %.6g vs grid %.6g (rel %.4f <= 0.005), "
                   "KKT residual %.2e (< 1e-4)",
                   solved.ee_value, grid_best, rel, solved.kkt_residual);
    if (!(solved.ee_value >= grid_best * (1.0 - 0.005)) || rel > 0.005 ||
        solved.kkt_residual >= 1e-4)
        pass = false;
    report(8, pass, "quasi-concavity probe and density optimizer vs grid oracle",
           details);
}

// ---------------------------------------------------------------- criterion 9
void criterion_9() {
    double worst = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double x = 0.12 * i;
        const double g1 = lower_incomplete_gamma(1.0, x);
        const double g2 = lower_incomplete_gamma(2.0, x);
        worst = std::max(worst, std::fabs(g1 - (1.0 - std::exp(-x))));
        worst = std::max(worst,
                         std::fabs(g2 - (1.0 - std::exp(-x) * (1.0 + x))));
        for (double a : {0.7, 1.6, 2.25, 3.4}) {
            const double lhs = lower_incomplete_gamma(a + 1.0, x);
            const double rhs =
                a * lower_incomplete_gamma(a, x) - std::pow(x, a) * std::exp(-x);
            worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs)));
        }
    }
    report(9, worst <= 1e-9, "incomplete gamma closed forms and recurrence",
           fmt("worst deviation %.3e (<= 1e-9) over the 100-point grid", worst));
}

// --------------------------------------------------------------- criterion 10
void criterion_10() {
    Rng rng(1010);
    double worst = 0.0;
    int checked = 0;
    while (checked < 50) {
        const std::size_t clusters = 1 + rng.index(4);
        const std::size_t files = 2 + rng.index(9);
        const std::size_t users = std::max<std::size_t>(clusters, 2 + rng.index(19));
        std::vector<PopularityProfile> profiles(users);
        for (auto& profile : profiles) {
            profile.probs.resize(files);
            double norm = 0.0;
            for (double& p : profile.probs) norm += (p = rng.uniform(0.01, 1.0));
            for (double& p : profile.probs) p /= norm;
        }
        std::vector<PopularityProfile> init;
        for (std::size_t k = 0; k < clusters; ++k) init.push_back(profiles[k]);
        ClusterModel model = kmeans(profiles, init);
        bool empty = false;
        for (std::size_t k = 0; k < clusters; ++k)
            if (model.member_counts[k] == 0) empty = true;
        if (empty) continue;
        score_model(model, profiles, files);
        const double grouped = log_likelihood(model, users, files);
        const double per_user = oracles::per_user_log_likelihood(profiles, model);
        worst = std::max(worst, std::fabs(grouped - per_user));
        worst = std::max(worst, std::fabs(model.log_likelihood - per_user));
        ++checked;
    }
    report(10, worst <= 1e-6, "grouped likelihood equals the per-user oracle",
           fmt("worst |difference| %.3e (<= 1e-6) over %d instances", worst, checked));
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    const auto wanted = [&](int criterion) {
        return selected.empty() ||
               std::find(selected.begin(), selected.end(), criterion) != selected.end();
    };
    if (wanted(1)) criterion_1();
    if (wanted(2)) criterion_2();
    if (wanted(3)) criterion_3();
    if (wanted(4)) criterion_4();
    if (wanted(5)) criterion_5();
    if (wanted(6)) criterion_6();
    if (wanted(7)) criterion_7();
    if (wanted(8)) criterion_8();
    if (wanted(9)) criterion_9();
    if (wanted(10)) criterion_10();
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
