#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "dense_bloch/numerics.hpp"
#include "dense_bloch/scenarios.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dense-bloch: collective decay, radiation trapping and intrinsic "
                 "bistability in dense two-level media"};
    app.set_version_flag("--version", std::string("dense-bloch ") + dense_bloch::kVersion);

    std::string scenario_name;
    std::string config_path;
    std::string out_dir;
    bool validate_only = false;
    bool with_shift = false;
    app.add_option("scenario", scenario_name,
                   "decay | spectrum | holstein | bistability | rates")
        ->required();
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_flag("--validate", validate_only, "check the configuration without running");
    app.add_flag("--with-shift", with_shift,
                 "add the collective light-shift column to spectrum snapshots");

    CLI11_PARSE(app, argc, argv);

    try {
        dense_bloch::RunConfig config = dense_bloch::load_run_config(config_path);
        const auto requested = dense_bloch::scenario_from_string(scenario_name);
        if (requested != config.scenario) {
            std::cerr << "error: config selects scenario '"
                      << dense_bloch::to_string(config.scenario) << "' but '" << scenario_name
                      << "' was requested\n";
            return 2;
        }
        if (!out_dir.empty())
            config.out_dir = out_dir;
        if (with_shift)
            config.include_shift = true;

        if (validate_only) {
            std::cout << dense_bloch::validate_report(config);
            return 0;
        }

        const dense_bloch::RunResult result = dense_bloch::run_scenario(config);
        for (const auto& file : result.output_files)
            std::cout << "wrote " << file << "\n";
        for (const auto& warning : result.warnings)
            std::cerr << "warning: " << warning << "\n";
        return result.exit_code;
    } catch (const dense_bloch::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dense_bloch::ConvergenceError& e) {
        std::cerr << "numerical non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
