#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cachenet/analytics.hpp"
#include "cachenet/geometry.hpp"

namespace cachenet {

// Flat scenario configuration behind the key=value config files. Defaults
// reproduce the reference experimental setup: a 10 km² disc, a 2000-file
// catalog with sizes in [10, 100] MB, Zipf(1) request popularity, α = 2.5,
// ρ0 = 21 dBm, ρ = 10.16 W, ρ_bh = 10 W, ρ_hd = 12.5e-5 W, cluster-count
// search range [5, 30].
struct Config {
    // region.*
    double area_km2 = 10.0;
    double user_density = 30.0;          // per km²
    double sbs_density_max = 2.5;        // per km²
    double comm_radius_km = 0.5;
    double active_sbs_density = 1.6;     // λ_s of the running experiment

    // channel.*
    double pathloss_exponent = 2.5;
    double target_rx_power_dbm = 21.0;
    double noise_power_w = 1e-13;
    double sinr_threshold = 0.01;

    // power.*
    double sbs_operational_w = 10.16;
    double backhaul_fetch_w = 10.0;
    double harddisk_fetch_w = 12.5e-5;

    // catalog.* (catalog plus the synthetic popularity generation around it)
    std::size_t num_files = 2000;
    double min_file_size_mb = 10.0;
    double max_file_size_mb = 100.0;
    double eta = 0.25;
    double zipf_exponent = 1.0;
    std::size_t true_clusters = 20;
    double profile_noise = 0.45;
    double ordering_correlation = 0.2;

    // clustering.*
    std::size_t search_min = 5;
    std::size_t search_max = 30;
    std::size_t patience = 2;

    // allocation.*
    double quota_relaxation = 1.2;       // N'_sk = ceil(relaxation · N_sk)
    double hotspot_scatter_km = 0.08;    // user scatter around cluster sites
    double sbs_hotspot_fraction = 1.0;   // share of SBSs deployed at hotspots

    // sim.*
    long realizations = 100000;
    int threads = 0;
    double interferer_disc_multiplier = 5.0;

    RegionSpec region() const;
    ChannelParams channel() const;
    PowerParams power() const;
    std::size_t num_users() const;  // round(λ · area)

    void validate() const;  // throws with the offending key in the message
};

// Assign one "section.key = value" pair. Unknown keys and malformed values
// throw with the key named.
void set_config_key(Config& config, const std::string& key, const std::string& value);

enum class ExperimentName {
    hit_vs_radius,
    ee_vs_cache,
    aic_trace,
    allocation_gain,
    validate_analytics,
    optimize_density,
};

const char* to_string(ExperimentName name);
ExperimentName experiment_from_string(const std::string& name);

struct ExperimentSpec {
    ExperimentName name = ExperimentName::hit_vs_radius;
    std::string sweep_parameter;       // config key varied across the grid
    std::vector<double> sweep_values;  // non-empty
    std::vector<std::uint64_t> seeds;  // non-empty
    Config base;

    void validate() const;
};

// Parse a config file. Lines are "key = value" with '#' comments; experiment
// control lives under experiment.*. Parse failures carry file:line
// diagnostics; unknown keys are errors naming the key.
ExperimentSpec load_config(const std::string& path);
ExperimentSpec parse_config(std::istream& in, const std::string& origin);

// The default spec serialized in config-file syntax (round-trips through
// parse_config).
void write_config(std::ostream& out, const ExperimentSpec& spec);
ExperimentSpec default_spec();

}  // namespace cachenet
