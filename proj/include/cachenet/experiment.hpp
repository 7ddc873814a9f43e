#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cachenet/config.hpp"

namespace cachenet {

struct ExperimentResult {
    std::vector<std::string> files_written;
};

// Runs the named experiment over the sweep grid × seeds and writes plot-ready
// CSVs (per-run rows plus an aggregated summary) into output_dir. Output is
// byte-identical for identical (spec, seeds).
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& output_dir);

// Randomized small-scale configuration for formula-vs-simulation validation:
// 2-4 clusters, a sub-200-file catalog, moderate densities and thresholds.
// Simulation controls are inherited from `base`.
Config random_desk_config(std::uint64_t seed, const Config& base);

}  // namespace cachenet
