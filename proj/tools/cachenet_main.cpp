#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cachenet/config.hpp"
#include "cachenet/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cachenet: cache-enabled small-cell network simulator and optimizer"};
    app.require_subcommand(1);

    std::string run_config;
    std::string output_dir = "out";
    CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", run_config, "Path to the experiment config")->required();
    run->add_option("-o,--out", output_dir, "Output directory for CSV files");

    std::string validate_config;
    CLI::App* validate =
        app.add_subcommand("validate", "Parse and validate a config file");
    validate->add_option("config", validate_config, "Path to the experiment config")
        ->required();

    app.add_subcommand("defaults", "Print the default configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const cachenet::ExperimentSpec spec = cachenet::load_config(run_config);
            const cachenet::ExperimentResult result =
                cachenet::run_experiment(spec, output_dir);
            for (const std::string& file : result.files_written)
                std::cout << file << "\n";
        } else if (validate->parsed()) {
            const cachenet::ExperimentSpec spec = cachenet::load_config(validate_config);
            std::cout << "ok: experiment " << cachenet::to_string(spec.name) << ", "
                      << spec.sweep_values.size() << " grid points, "
                      << spec.seeds.size() << " seeds\n";
        } else {
            cachenet::write_config(std::cout, cachenet::default_spec());
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
