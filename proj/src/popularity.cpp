#include "cachenet/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cachenet/rng.hpp"

namespace cachenet {

double Catalog::total_size_bits() const {
    return std::accumulate(file_sizes_bits.begin(), file_sizes_bits.end(), 0.0);
}

double Catalog::normalized_cache_size() const {
    return cache_capacity_bits / total_size_bits();
}

void Catalog::validate() const {
    if (file_sizes_bits.empty()) throw std::invalid_argument("catalog: no files");
    double smallest = file_sizes_bits.front();
    for (double s : file_sizes_bits) {
        if (!(s > 0.0)) throw std::invalid_argument("catalog: file sizes must be > 0");
        smallest = std::min(smallest, s);
    }
    if (cache_capacity_bits < smallest)
        throw std::invalid_argument("catalog: cache must hold at least one file");
    const double eta = normalized_cache_size();
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("catalog: normalized cache size must be in (0, 1]");
}

std::vector<double> zipf_pmf(std::size_t n, double exponent) {
    if (n == 0) throw std::invalid_argument("zipf_pmf: empty support");
    if (!(exponent > 0.0)) throw std::invalid_argument("zipf_pmf: exponent must be > 0");
    std::vector<double> p(n);
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        p[r] = std::pow(static_cast<double>(r + 1), -exponent);
        norm += p[r];
    }
    for (double& v : p) v /= norm;
    return p;
}

Catalog make_catalog(std::size_t num_files, double min_size_bits, double max_size_bits,
                     double eta, std::uint64_t seed) {
    if (num_files == 0) throw std::invalid_argument("make_catalog: no files");
    if (!(min_size_bits > 0.0) || max_size_bits < min_size_bits)
        throw std::invalid_argument("make_catalog: bad size range");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("make_catalog: eta must be in (0, 1]");
    Rng rng(seed);
    Catalog catalog;
    catalog.file_sizes_bits.resize(num_files);
    for (double& s : catalog.file_sizes_bits)
        s = rng.uniform(min_size_bits, max_size_bits);
    catalog.cache_capacity_bits = eta * catalog.total_size_bits();
    catalog.validate();
    return catalog;
}

GroundTruth make_ground_truth(std::size_t num_clusters, std::size_t num_users,
                              std::size_t num_files, std::uint64_t seed,
                              double ordering_correlation) {
    if (num_clusters == 0) throw std::invalid_argument("make_ground_truth: no clusters");
    if (ordering_correlation < 0.0 || ordering_correlation > 1.0)
        throw std::invalid_argument("make_ground_truth: correlation must be in [0, 1]");
    Rng rng(seed);
    GroundTruth truth;
    truth.true_num_clusters = num_clusters;
    truth.per_user_cluster.resize(num_users);
    for (auto& c : truth.per_user_cluster) c = rng.index(num_clusters);

    std::vector<double> global_score(num_files);
    for (double& s : global_score) s = rng.uniform();
    std::vector<double> score(num_files);
    truth.orderings.resize(num_clusters);
    for (auto& ordering : truth.orderings) {
        for (std::size_t i = 0; i < num_files; ++i)
            score[i] = (1.0 - ordering_correlation) * rng.uniform() +
                       ordering_correlation * global_score[i];
        ordering.resize(num_files);
        std::iota(ordering.begin(), ordering.end(), 0u);
        std::stable_sort(ordering.begin(), ordering.end(),
                         [&](std::uint32_t a, std::uint32_t b) {
                             return score[a] > score[b];
                         });
    }
    return truth;
}

std::vector<PopularityProfile> generate_profiles(const Catalog& catalog,
                                                 const GroundTruth& truth,
                                                 double zipf_exponent, double noise,
                                                 std::uint64_t seed) {
    if (noise < 0.0 || noise > 1.0)
        throw std::invalid_argument("generate_profiles: noise must be in [0, 1]");
    const std::size_t F = catalog.num_files();
    const std::vector<double> zipf = zipf_pmf(F, zipf_exponent);
    Rng rng(seed);
    std::vector<PopularityProfile> profiles(truth.per_user_cluster.size());
    std::vector<std::uint32_t> personal(F);
    for (std::size_t u = 0; u < profiles.size(); ++u) {
        const std::size_t c = truth.per_user_cluster[u];
        if (c >= truth.orderings.size())
            throw std::invalid_argument("generate_profiles: cluster index out of range");
        const auto& ordering = truth.orderings[c];
        std::vector<double>& p = profiles[u].probs;
        p.assign(F, 0.0);
        for (std::size_t rank = 0; rank < F; ++rank)
            p[ordering[rank]] = (1.0 - noise) * zipf[rank];
        if (noise > 0.0) {
            std::iota(personal.begin(), personal.end(), 0u);
            for (std::size_t i = F; i > 1; --i) {
                const std::size_t j = rng.index(i);
                std::swap(personal[i - 1], personal[j]);
            }
            for (std::size_t rank = 0; rank < F; ++rank)
                p[personal[rank]] += noise * zipf[rank];
        }
    }
    return profiles;
}

PopularityProfile cluster_mean_profile(std::span<const PopularityProfile> profiles,
                                       std::span<const std::size_t> members) {
    if (members.empty())
        throw std::invalid_argument("cluster_mean_profile: empty member set");
    const std::size_t F = profiles[members[0]].probs.size();
    PopularityProfile mean;
    mean.probs.assign(F, 0.0);
    for (std::size_t u : members) {
        const auto& p = profiles[u].probs;
        for (std::size_t i = 0; i < F; ++i) mean.probs[i] += p[i];
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (double& v : mean.probs) v *= inv;
    return mean;
}

CacheSet select_cache_set(const PopularityProfile& mean_profile, const Catalog& catalog) {
    const std::size_t F = catalog.num_files();
    if (mean_profile.probs.size() != F)
        throw std::invalid_argument("select_cache_set: profile/catalog size mismatch");
    std::vector<std::uint32_t> order(F);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return mean_profile.probs[a] > mean_profile.probs[b];
    });
    CacheSet cache;
    double residual = catalog.cache_capacity_bits;
    for (std::uint32_t file : order) {
        const double size = catalog.file_sizes_bits[file];
        if (size <= residual) {
            cache.files.push_back(file);
            cache.total_size_bits += size;
            residual -= size;
        }
    }
    std::sort(cache.files.begin(), cache.files.end());
    return cache;
}

double cached_mass(const PopularityProfile& profile, const CacheSet& cache) {
    double mass = 0.0;
    for (std::uint32_t file : cache.files) mass += profile.probs[file];
    return mass;
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
    out.precision(17);
    out << "# file_index size_bits\n";
    out << "capacity_bits " << catalog.cache_capacity_bits << "\n";
    for (std::size_t i = 0; i < catalog.num_files(); ++i)
        out << i << " " << catalog.file_sizes_bits[i] << "\n";
}

Catalog read_catalog(std::istream& in) {
    Catalog catalog;
    std::string line;
    bool have_capacity = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string first;
        row >> first;
        if (first == "capacity_bits") {
            row >> catalog.cache_capacity_bits;
            have_capacity = true;
            continue;
        }
        const std::size_t index = std::stoul(first);
        double size = 0.0;
        row >> size;
        if (index != catalog.file_sizes_bits.size())
            throw std::runtime_error("read_catalog: file rows out of order");
        catalog.file_sizes_bits.push_back(size);
    }
    if (!have_capacity) throw std::runtime_error("read_catalog: missing capacity row");
    catalog.validate();
    return catalog;
}

void write_profiles(std::ostream& out, std::span<const PopularityProfile> profiles) {
    out.precision(17);
    out << "# one row per user: F request probabilities\n";
    for (const auto& profile : profiles) {
        for (std::size_t i = 0; i < profile.probs.size(); ++i) {
            if (i) out << " ";
            out << profile.probs[i];
        }
        out << "\n";
    }
}

std::vector<PopularityProfile> read_profiles(std::istream& in) {
    std::vector<PopularityProfile> profiles;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        PopularityProfile profile;
        double v = 0.0;
        while (row >> v) profile.probs.push_back(v);
        if (!profiles.empty() && profile.probs.size() != profiles.front().probs.size())
            throw std::runtime_error("read_profiles: ragged rows");
        profiles.push_back(std::move(profile));
    }
    return profiles;
}

}  // namespace cachenet
