#include "cachenet/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cachenet {

RegionSpec Config::region() const {
    RegionSpec region;
    region.radius_km = std::sqrt(area_km2 / kPi);
    region.user_density = user_density;
    region.sbs_density_max = sbs_density_max;
    region.comm_radius_km = comm_radius_km;
    return region;
}

ChannelParams Config::channel() const {
    ChannelParams channel;
    channel.pathloss_exponent = pathloss_exponent;
    channel.target_rx_power_w = std::pow(10.0, target_rx_power_dbm / 10.0) / 1000.0;
    channel.noise_power_w = noise_power_w;
    channel.sinr_threshold = sinr_threshold;
    return channel;
}

PowerParams Config::power() const {
    return {sbs_operational_w, backhaul_fetch_w, harddisk_fetch_w};
}

std::size_t Config::num_users() const {
    return static_cast<std::size_t>(std::llround(user_density * area_km2));
}

void Config::validate() const {
    region().validate();
    channel().validate();
    power().validate();
    if (!(active_sbs_density > 0.0) || active_sbs_density > sbs_density_max)
        throw std::invalid_argument(
            "region.active_sbs_density_per_km2 must be in (0, sbs_density_max]");
    if (num_files == 0) throw std::invalid_argument("catalog.num_files must be >= 1");
    if (!(min_file_size_mb > 0.0) || max_file_size_mb < min_file_size_mb)
        throw std::invalid_argument("catalog file size range is invalid");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("catalog.eta must be in (0, 1]");
    if (!(zipf_exponent > 0.0))
        throw std::invalid_argument("catalog.zipf_exponent must be > 0");
    if (true_clusters == 0)
        throw std::invalid_argument("catalog.true_clusters must be >= 1");
    if (profile_noise < 0.0 || profile_noise > 1.0)
        throw std::invalid_argument("catalog.profile_noise must be in [0, 1]");
    if (ordering_correlation < 0.0 || ordering_correlation > 1.0)
        throw std::invalid_argument("catalog.ordering_correlation must be in [0, 1]");
    if (search_min < 1 || search_min > search_max)
        throw std::invalid_argument("clustering search range is invalid");
    if (search_max > num_users())
        throw std::invalid_argument("clustering.search_max exceeds the user count");
    if (!(quota_relaxation >= 1.0))
        throw std::invalid_argument("allocation.quota_relaxation must be >= 1");
    if (!(hotspot_scatter_km > 0.0))
        throw std::invalid_argument("allocation.hotspot_scatter_km must be > 0");
    if (sbs_hotspot_fraction < 0.0 || sbs_hotspot_fraction > 1.0)
        throw std::invalid_argument("allocation.sbs_hotspot_fraction must be in [0, 1]");
    if (realizations < 1)
        throw std::invalid_argument("sim.realizations must be >= 1");
    if (threads < 0) throw std::invalid_argument("sim.threads must be >= 0");
    if (!(interferer_disc_multiplier >= 1.0))
        throw std::invalid_argument("sim.interferer_disc_multiplier must be >= 1");
}

namespace {

using Setter = std::function<void(Config&, const std::string&)>;

double parse_double(const std::string& key, const std::string& value) {
    std::size_t consumed = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric value for key '" + key + "': " + value);
    }
    if (consumed != value.size())
        throw std::invalid_argument("bad numeric value for key '" + key + "': " + value);
    return parsed;
}

long parse_long(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != std::floor(v))
        throw std::invalid_argument("key '" + key + "' expects an integer: " + value);
    return static_cast<long>(v);
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"region.area_km2", [](Config& c, const std::string& v) { c.area_km2 = parse_double("region.area_km2", v); }},
        {"region.user_density_per_km2", [](Config& c, const std::string& v) { c.user_density = parse_double("region.user_density_per_km2", v); }},
        {"region.sbs_density_max_per_km2", [](Config& c, const std::string& v) { c.sbs_density_max = parse_double("region.sbs_density_max_per_km2", v); }},
        {"region.comm_radius_km", [](Config& c, const std::string& v) { c.comm_radius_km = parse_double("region.comm_radius_km", v); }},
        {"region.active_sbs_density_per_km2", [](Config& c, const std::string& v) { c.active_sbs_density = parse_double("region.active_sbs_density_per_km2", v); }},
        {"channel.pathloss_exponent", [](Config& c, const std::string& v) { c.pathloss_exponent = parse_double("channel.pathloss_exponent", v); }},
        {"channel.target_rx_power_dbm", [](Config& c, const std::string& v) { c.target_rx_power_dbm = parse_double("channel.target_rx_power_dbm", v); }},
        {"channel.noise_power_w", [](Config& c, const std::string& v) { c.noise_power_w = parse_double("channel.noise_power_w", v); }},
        {"channel.sinr_threshold", [](Config& c, const std::string& v) { c.sinr_threshold = parse_double("channel.sinr_threshold", v); }},
        {"power.sbs_operational_w", [](Config& c, const std::string& v) { c.sbs_operational_w = parse_double("power.sbs_operational_w", v); }},
        {"power.backhaul_fetch_w", [](Config& c, const std::string& v) { c.backhaul_fetch_w = parse_double("power.backhaul_fetch_w", v); }},
        {"power.harddisk_fetch_w", [](Config& c, const std::string& v) { c.harddisk_fetch_w = parse_double("power.harddisk_fetch_w", v); }},
        {"catalog.num_files", [](Config& c, const std::string& v) { c.num_files = static_cast<std::size_t>(parse_long("catalog.num_files", v)); }},
        {"catalog.min_file_size_mb", [](Config& c, const std::string& v) { c.min_file_size_mb = parse_double("catalog.min_file_size_mb", v); }},
        {"catalog.max_file_size_mb", [](Config& c, const std::string& v) { c.max_file_size_mb = parse_double("catalog.max_file_size_mb", v); }},
        {"catalog.eta", [](Config& c, const std::string& v) { c.eta = parse_double("catalog.eta", v); }},
        {"catalog.zipf_exponent", [](Config& c, const std::string& v) { c.zipf_exponent = parse_double("catalog.zipf_exponent", v); }},
        {"catalog.true_clusters", [](Config& c, const std::string& v) { c.true_clusters = static_cast<std::size_t>(parse_long("catalog.true_clusters", v)); }},
        {"catalog.profile_noise", [](Config& c, const std::string& v) { c.profile_noise = parse_double("catalog.profile_noise", v); }},
        {"catalog.ordering_correlation", [](Config& c, const std::string& v) { c.ordering_correlation = parse_double("catalog.ordering_correlation", v); }},
        {"clustering.search_min", [](Config& c, const std::string& v) { c.search_min = static_cast<std::size_t>(parse_long("clustering.search_min", v)); }},
        {"clustering.search_max", [](Config& c, const std::string& v) { c.search_max = static_cast<std::size_t>(parse_long("clustering.search_max", v)); }},
        {"clustering.patience", [](Config& c, const std::string& v) { c.patience = static_cast<std::size_t>(parse_long("clustering.patience", v)); }},
        {"allocation.quota_relaxation", [](Config& c, const std::string& v) { c.quota_relaxation = parse_double("allocation.quota_relaxation", v); }},
        {"allocation.hotspot_scatter_km", [](Config& c, const std::string& v) { c.hotspot_scatter_km = parse_double("allocation.hotspot_scatter_km", v); }},
        {"allocation.sbs_hotspot_fraction", [](Config& c, const std::string& v) { c.sbs_hotspot_fraction = parse_double("allocation.sbs_hotspot_fraction", v); }},
        {"sim.realizations", [](Config& c, const std::string& v) { c.realizations = parse_long("sim.realizations", v); }},
        {"sim.threads", [](Config& c, const std::string& v) { c.threads = static_cast<int>(parse_long("sim.threads", v)); }},
        {"sim.interferer_disc_multiplier", [](Config& c, const std::string& v) { c.interferer_disc_multiplier = parse_double("sim.interferer_disc_multiplier", v); }},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// shortest representation that parses back to the same double
std::string format_double(double value) {
    char buffer[32];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, end);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

}  // namespace

void set_config_key(Config& config, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end())
        throw std::invalid_argument("unknown config key '" + key + "'");
    it->second(config, value);
}

const char* to_string(ExperimentName name) {
    switch (name) {
        case ExperimentName::hit_vs_radius: return "hit_vs_radius";
        case ExperimentName::ee_vs_cache: return "ee_vs_cache";
        case ExperimentName::aic_trace: return "aic_trace";
        case ExperimentName::allocation_gain: return "allocation_gain";
        case ExperimentName::validate_analytics: return "validate_analytics";
        case ExperimentName::optimize_density: return "optimize_density";
    }
    return "unknown";
}

ExperimentName experiment_from_string(const std::string& name) {
    for (ExperimentName candidate :
         {ExperimentName::hit_vs_radius, ExperimentName::ee_vs_cache,
          ExperimentName::aic_trace, ExperimentName::allocation_gain,
          ExperimentName::validate_analytics, ExperimentName::optimize_density}) {
        if (name == to_string(candidate)) return candidate;
    }
    throw std::invalid_argument("unknown experiment name '" + name + "'");
}

void ExperimentSpec::validate() const {
    base.validate();
    if (sweep_values.empty())
        throw std::invalid_argument("experiment.sweep_values must be non-empty");
    if (seeds.empty()) throw std::invalid_argument("experiment.seeds must be non-empty");
    if (!sweep_parameter.empty()) {
        Config probe = base;
        set_config_key(probe, sweep_parameter, "1");  // key must exist
    }
}

ExperimentSpec parse_config(std::istream& in, const std::string& origin) {
    ExperimentSpec spec = default_spec();
    spec.sweep_parameter.clear();
    spec.sweep_values.clear();
    spec.seeds.clear();
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(line_number) +
                                     ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "experiment.name") {
                spec.name = experiment_from_string(value);
            } else if (key == "experiment.sweep_parameter") {
                spec.sweep_parameter = value;
            } else if (key == "experiment.sweep_values") {
                for (const std::string& item : split_list(value))
                    spec.sweep_values.push_back(parse_double(key, item));
            } else if (key == "experiment.seeds") {
                for (const std::string& item : split_list(value))
                    spec.seeds.push_back(
                        static_cast<std::uint64_t>(parse_long(key, item)));
            } else {
                set_config_key(spec.base, key, value);
            }
        } catch (const std::exception& error) {
            throw std::runtime_error(origin + ":" + std::to_string(line_number) + ": " +
                                     error.what());
        }
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

void write_config(std::ostream& out, const ExperimentSpec& spec) {
    const Config& c = spec.base;
    out << "# cachenet experiment configuration\n";
    out << "experiment.name = " << to_string(spec.name) << "\n";
    out << "experiment.sweep_parameter = " << spec.sweep_parameter << "\n";
    out << "experiment.sweep_values = ";
    for (std::size_t i = 0; i < spec.sweep_values.size(); ++i)
        out << (i ? ", " : "") << format_double(spec.sweep_values[i]);
    out << "\n";
    out << "experiment.seeds = ";
    for (std::size_t i = 0; i < spec.seeds.size(); ++i)
        out << (i ? ", " : "") << spec.seeds[i];
    out << "\n\n";
    out << "region.area_km2 = " << format_double(c.area_km2) << "\n";
    out << "region.user_density_per_km2 = " << format_double(c.user_density) << "\n";
    out << "region.sbs_density_max_per_km2 = " << format_double(c.sbs_density_max) << "\n";
    out << "region.comm_radius_km = " << format_double(c.comm_radius_km) << "\n";
    out << "region.active_sbs_density_per_km2 = " << format_double(c.active_sbs_density)
        << "\n\n";
    out << "channel.pathloss_exponent = " << format_double(c.pathloss_exponent) << "\n";
    out << "channel.target_rx_power_dbm = " << format_double(c.target_rx_power_dbm) << "\n";
    out << "channel.noise_power_w = " << format_double(c.noise_power_w) << "\n";
    out << "channel.sinr_threshold = " << format_double(c.sinr_threshold) << "\n\n";
    out << "power.sbs_operational_w = " << format_double(c.sbs_operational_w) << "\n";
    out << "power.backhaul_fetch_w = " << format_double(c.backhaul_fetch_w) << "\n";
    out << "power.harddisk_fetch_w = " << format_double(c.harddisk_fetch_w) << "\n\n";
    out << "catalog.num_files = " << c.num_files << "\n";
    out << "catalog.min_file_size_mb = " << format_double(c.min_file_size_mb) << "\n";
    out << "catalog.max_file_size_mb = " << format_double(c.max_file_size_mb) << "\n";
    out << "catalog.eta = " << format_double(c.eta) << "\n";
    out << "catalog.zipf_exponent = " << format_double(c.zipf_exponent) << "\n";
    out << "catalog.true_clusters = " << c.true_clusters << "\n";
    out << "catalog.profile_noise = " << format_double(c.profile_noise) << "\n";
    out << "catalog.ordering_correlation = " << format_double(c.ordering_correlation)
        << "\n\n";
    out << "clustering.search_min = " << c.search_min << "\n";
    out << "clustering.search_max = " << c.search_max << "\n";
    out << "clustering.patience = " << c.patience << "\n\n";
    out << "allocation.quota_relaxation = " << format_double(c.quota_relaxation) << "\n";
    out << "allocation.hotspot_scatter_km = " << format_double(c.hotspot_scatter_km)
        << "\n";
    out << "allocation.sbs_hotspot_fraction = " << format_double(c.sbs_hotspot_fraction)
        << "\n\n";
    out << "sim.realizations = " << c.realizations << "\n";
    out << "sim.threads = " << c.threads << "\n";
    out << "sim.interferer_disc_multiplier = "
        << format_double(c.interferer_disc_multiplier) << "\n";
}

ExperimentSpec default_spec() {
    ExperimentSpec spec;
    spec.name = ExperimentName::hit_vs_radius;
    spec.sweep_parameter = "region.comm_radius_km";
    spec.sweep_values = {0.3, 0.5, 0.7, 0.9, 1.1};
    spec.seeds = {1, 2, 3, 4, 5};
    return spec;
}

}  // namespace cachenet
