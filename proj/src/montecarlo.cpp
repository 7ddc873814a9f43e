#include "cachenet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cachenet/rng.hpp"

namespace cachenet {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

double pairwise_sum_impl(const double* data, std::size_t n) {
    if (n <= 32) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += data[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

SimEstimate reduce(const std::vector<double>& values) {
    SimEstimate est;
    est.n = static_cast<long>(values.size());
    if (values.empty()) return est;
    est.mean = pairwise_sum_impl(values.data(), values.size()) /
               static_cast<double>(values.size());
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - est.mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum_impl(sq.data(), sq.size()) /
                           static_cast<double>(values.size() - 1);
        est.stderr_mean = std::sqrt(var / static_cast<double>(values.size()));
    }
    return est;
}

// Realization r draws from its own substream, so the estimate is bit-for-bit
// reproducible for any thread count.
template <class PerRealization>
SimEstimate run_realizations(long n, std::uint64_t seed, int threads,
                             PerRealization&& body) {
    if (n < 1) throw std::invalid_argument("montecarlo: need at least one realization");
    std::vector<double> values(static_cast<std::size_t>(n));
    const int t = std::min<long>(resolve_threads(threads), n);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        const long begin = n * w / t;
        const long end = n * (w + 1) / t;
        workers.emplace_back([&, begin, end]() {
            for (long r = begin; r < end; ++r) {
                Rng rng(substream_seed(seed, static_cast<std::uint64_t>(r)));
                values[static_cast<std::size_t>(r)] = body(rng);
            }
        });
    }
    for (auto& worker : workers) worker.join();
    return reduce(values);
}

// Shared read-only tables for the scenario-driven estimators.
struct ScenarioTables {
    std::size_t num_users = 0;
    std::size_t num_clusters = 0;
    std::size_t num_files = 0;
    std::vector<double> request_cdf;      // U × F prefix sums
    std::vector<std::uint8_t> cached;     // K × F membership
    std::vector<std::size_t> user_cluster;

    explicit ScenarioTables(const ClusteredScenario& s) {
        s.validate();
        num_users = s.num_users();
        num_clusters = s.num_clusters();
        num_files = num_users ? s.profiles[0].probs.size() : 0;
        request_cdf.resize(num_users * num_files);
        for (std::size_t u = 0; u < num_users; ++u) {
            double acc = 0.0;
            for (std::size_t i = 0; i < num_files; ++i) {
                acc += s.profiles[u].probs[i];
                request_cdf[u * num_files + i] = acc;
            }
        }
        if (num_files == 0 && !s.cache_sets.empty() && !s.cache_sets[0].files.empty())
            num_files = s.cache_sets[0].files.back() + 1;
        cached.assign(num_clusters * num_files, 0);
        for (std::size_t k = 0; k < num_clusters; ++k)
            for (std::uint32_t f : s.cache_sets[k].files)
                cached[k * num_files + f] = 1;
        user_cluster = s.assignment;
    }

    std::size_t draw_request(Rng& rng, std::size_t user) const {
        const double x = rng.uniform();
        const double* begin = request_cdf.data() + user * num_files;
        const double* it = std::lower_bound(begin, begin + num_files, x);
        const std::size_t i = static_cast<std::size_t>(it - begin);
        return std::min(i, num_files - 1);
    }

    bool is_cached(std::size_t cluster, std::size_t file) const {
        return cached[cluster * num_files + file] != 0;
    }
};

struct MarkedSbs {
    double x, y;
    std::size_t cluster;
};

// Per-cluster PPPs on a disc of the given radius around the origin.
void sample_marked_sbs(Rng& rng, const DensityVector& densities, double radius,
                       std::vector<MarkedSbs>& out) {
    out.clear();
    const double area = kPi * radius * radius;
    for (std::size_t k = 0; k < densities.size(); ++k) {
        const long count = rng.poisson(densities.per_cluster[k] * area);
        for (long i = 0; i < count; ++i) {
            const double r = radius * std::sqrt(rng.uniform());
            const double phi = 2.0 * kPi * rng.uniform();
            out.push_back({r * std::cos(phi), r * std::sin(phi), k});
        }
    }
}

// Distance to the nearest point of a density-λ PPP: F(d) = 1 − e^{−λπd²}.
double draw_nearest_distance(Rng& rng, double lambda) {
    return std::sqrt(-std::log(rng.uniform_pos()) / (lambda * kPi));
}

}  // namespace

SimEstimate simulate_hit(const SimConfig& config) {
    const ScenarioTables tables(config.scenario);
    const ClusteredScenario& s = config.scenario;
    const double comm_r = s.region.comm_radius_km;
    return run_realizations(
        config.num_realizations, config.seed, config.threads, [&](Rng& rng) -> double {
            if (tables.num_users == 0) return 0.0;
            const std::size_t u = rng.index(tables.num_users);
            const std::size_t file = tables.draw_request(rng, u);
            for (std::size_t k = 0; k < tables.num_clusters; ++k) {
                if (!tables.is_cached(k, file)) continue;
                const double mean =
                    s.densities.per_cluster[k] * kPi * comm_r * comm_r;
                if (rng.poisson(mean) > 0) return 1.0;
            }
            return 0.0;
        });
}

SimEstimate simulate_coverage(const SimConfig& config) {
    const ClusteredScenario& s = config.scenario;
    s.validate();
    if (!(s.channel.pathloss_exponent > 2.0))
        throw std::invalid_argument("simulate_coverage: pathloss exponent must exceed 2");
    const double alpha = s.channel.pathloss_exponent;
    const double rho0 = s.channel.target_rx_power_w;
    const double comm_r = s.region.comm_radius_km;
    const double disc = config.interferer_disc_multiplier * s.region.radius_km;
    const double disc_area = kPi * disc * disc;
    return run_realizations(
        config.num_realizations, config.seed, config.threads, [&](Rng& rng) -> double {
            const double signal = rho0 * rng.exponential();
            double interference = 0.0;
            for (std::size_t k = 0; k < s.densities.size(); ++k) {
                const double lambda_sk = s.densities.per_cluster[k];
                if (lambda_sk <= 0.0) continue;
                const long count = rng.poisson(lambda_sk * disc_area);
                for (long i = 0; i < count; ++i) {
                    const double r = disc * std::sqrt(rng.uniform());
                    const double link = draw_nearest_distance(rng, lambda_sk);
                    if (link > comm_r) continue;  // that SBS has no link to serve
                    const double tx = rho0 * std::pow(link, alpha);
                    interference += tx * rng.exponential() * std::pow(r, -alpha);
                }
            }
            const double sinr = signal / (s.channel.noise_power_w + interference);
            return sinr >= s.channel.sinr_threshold ? 1.0 : 0.0;
        });
}

SimEstimate simulate_total_power(const SimConfig& config) {
    const ScenarioTables tables(config.scenario);
    const ClusteredScenario& s = config.scenario;
    const double comm_r = s.region.comm_radius_km;
    const double alpha = s.channel.pathloss_exponent;
    const double rho0 = s.channel.target_rx_power_w;
    const double mean_links = s.densities.total() * s.region.area_km2();
    return run_realizations(
        config.num_realizations, config.seed, config.threads, [&](Rng& rng) -> double {
            thread_local std::vector<MarkedSbs> sbs;
            // operational power of the realized SBS population
            double total = s.power.sbs_operational_w *
                           static_cast<double>(rng.poisson(mean_links));
            if (tables.num_users == 0) return total;

            const std::size_t u = rng.index(tables.num_users);
            const std::size_t file = tables.draw_request(rng, u);
            const std::size_t own = tables.user_cluster[u];
            sample_marked_sbs(rng, s.densities, comm_r, sbs);

            double best_store = -1.0, best_own = -1.0;
            for (const MarkedSbs& b : sbs) {
                const double d = std::sqrt(b.x * b.x + b.y * b.y);
                if (tables.is_cached(b.cluster, file) &&
                    (best_store < 0.0 || d < best_store))
                    best_store = d;
                if (b.cluster == own && (best_own < 0.0 || d < best_own))
                    best_own = d;
            }

            double fetch, tx = 0.0;
            if (best_store >= 0.0) {  // hit: closest SBS storing the file
                fetch = s.power.harddisk_fetch_w;
                tx = rho0 * std::pow(best_store, alpha);
            } else {  // miss: backhaul via the own-cluster SBS, silent if none
                fetch = s.power.backhaul_fetch_w;
                if (best_own >= 0.0) tx = rho0 * std::pow(best_own, alpha);
            }
            return total + mean_links * (fetch + tx);
        });
}

SimEstimate simulate_mean_nearest_tx_power(double lambda_sk, const ChannelParams& channel,
                                           double comm_radius_km, long n,
                                           std::uint64_t seed) {
    if (!(lambda_sk > 0.0))
        throw std::invalid_argument("simulate_mean_nearest_tx_power: density must be > 0");
    return run_realizations(n, seed, 0, [&](Rng& rng) -> double {
        const double r = draw_nearest_distance(rng, lambda_sk);
        if (r > comm_radius_km) return 0.0;
        return channel.target_rx_power_w * std::pow(r, channel.pathloss_exponent);
    });
}

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_impl(values.data(), values.size());
}

void write_validation_table(std::ostream& out, std::span<const ValidationRow> rows) {
    out << "name,estimate,stderr,analytic_value,z_score\n";
    out.precision(12);
    for (const auto& row : rows)
        out << row.name << "," << row.estimate.mean << "," << row.estimate.stderr_mean
            << "," << row.analytic_value << "," << row.z_score() << "\n";
}

}  // namespace cachenet
