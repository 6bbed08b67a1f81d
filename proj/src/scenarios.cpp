#include "dense_bloch/scenarios.hpp"

#include <cmath>
#include <filesystem>

#include "dense_bloch/csv.hpp"
#include "dense_bloch/dynamics.hpp"
#include "dense_bloch/holstein.hpp"
#include "dense_bloch/rates.hpp"

namespace dense_bloch {

namespace {

std::string output_path(const RunConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.out_dir);
    return (std::filesystem::path(config.out_dir) / name).string();
}

CsvWriter make_writer(const RunConfig& config) {
    CsvWriter writer;
    for (const auto& [key, value] : config.resolved)
        writer.add_metadata(key, value);
    return writer;
}

DecayControls decay_controls(const RunConfig& config) {
    DecayControls controls;
    controls.ode.error_tol = config.ode_tol;
    controls.quadrature.absolute_tol = config.quad_tol;
    controls.quadrature.relative_tol = config.quad_tol;
    return controls;
}

RunResult run_decay(const RunConfig& config) {
    RunResult result;
    AtomicState initial;
    initial.rho_aa = config.rho_aa0;
    const DecayTrajectory traj =
        evolve_two_level(initial, config.groups, config.t_end, config.samples,
                         decay_controls(config));

    CsvWriter writer = make_writer(config);
    writer.add_metadata("t_end", config.t_end);
    writer.add_metadata("rho_aa0", config.rho_aa0);
    writer.add_metadata("markov_flag", traj.markov_flag ? "1" : "0");
    writer.set_header({"t", "rho_aa", "Gamma_over_gamma", "Gamma_eff_over_gamma"});
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        writer.add_row({traj.times[i], traj.rho_aa[i], traj.gamma_avg[i], traj.gamma_eff[i]});
    const std::string path = output_path(config, "decay.csv");
    writer.write(path);
    result.output_files.push_back(path);
    if (traj.markov_flag) {
        result.warnings.push_back("Markov approximation violated - superradiant regime");
        result.exit_code = 4;
    }
    return result;
}

RunResult run_spectrum(const RunConfig& config) {
    RunResult result;
    AtomicState initial;
    initial.rho_aa = config.rho_aa0;
    std::vector<double> grid(config.spectrum_points);
    for (int i = 0; i < config.spectrum_points; ++i)
        grid[i] = -config.span_doppler +
                  2.0 * config.span_doppler * i / (config.spectrum_points - 1);
    const DecayTrajectory traj =
        evolve_two_level(initial, config.groups, config.t_end, config.samples,
                         decay_controls(config), config.snapshot_times, grid);

    CsvWriter writer = make_writer(config);
    writer.add_metadata("t_end", config.t_end);
    writer.add_metadata("span_doppler", config.span_doppler);
    writer.add_metadata("markov_flag", traj.markov_flag ? "1" : "0");
    std::vector<std::string> header = {"t", "rho_aa", "delta_over_doppler", "profile"};
    if (config.include_shift)
        header.push_back("shift_over_hbar_gamma");
    writer.set_header(header);

    const double doppler = config.groups.doppler_width();
    for (const SpectrumSnapshot& snap : traj.snapshots) {
        std::vector<double> shifts;
        if (config.include_shift) {
            AtomicState state;
            state.rho_aa = snap.rho_aa;
            std::vector<double> deltas(snap.delta_over_doppler.size());
            for (std::size_t i = 0; i < deltas.size(); ++i)
                deltas[i] = snap.delta_over_doppler[i] * doppler;
            shifts = shift_profile(state, config.groups, deltas);
        }
        for (std::size_t i = 0; i < snap.delta_over_doppler.size(); ++i) {
            std::vector<double> row = {snap.time, snap.rho_aa, snap.delta_over_doppler[i],
                                       snap.profile[i]};
            if (config.include_shift)
                row.push_back(shifts[i]);
            writer.add_row(row);
        }
    }
    const std::string path = output_path(config, "spectrum.csv");
    writer.write(path);
    result.output_files.push_back(path);
    if (traj.markov_flag) {
        result.warnings.push_back("Markov approximation violated - superradiant regime");
        result.exit_code = 4;
    }
    return result;
}

RunResult run_holstein(const RunConfig& config) {
    RunResult result;
    const TrappingKernel kernel = build_slab_kernel(1.0, config.kappa, config.node_count);
    const EscapeRateResult escape = escape_rate(kernel);

    CsvWriter writer = make_writer(config);
    writer.add_metadata("lambda_max", escape.lambda_max);
    writer.set_header({"gamma_esc_numeric", "gamma_esc_asymptotic"});
    writer.add_row({escape.gamma_esc_numeric, escape.gamma_esc_asymptotic});
    const std::string path = output_path(config, "holstein.csv");
    writer.write(path);
    result.output_files.push_back(path);

    if (config.export_kernel) {
        CsvWriter kw = make_writer(config);
        std::vector<std::string> header = {"z"};
        for (int j = 0; j < kernel.size(); ++j)
            header.push_back("g" + std::to_string(j));
        kw.set_header(header);
        for (int i = 0; i < kernel.size(); ++i) {
            std::vector<double> row = {kernel.nodes[i]};
            for (int j = 0; j < kernel.size(); ++j)
                row.push_back(kernel.entry(i, j));
            kw.add_row(row);
        }
        const std::string kpath = output_path(config, "kernel.csv");
        kw.write(kpath);
        result.output_files.push_back(kpath);
    }
    return result;
}

RunResult run_bistability(const RunConfig& config) {
    RunResult result;
    const std::vector<BranchPoint> points = self_consistent_branches(config.bistability);

    CsvWriter writer = make_writer(config);
    const bool with_gamma = config.bistability.mode != CollectiveMode::off;
    std::vector<std::string> header = {"Omega_over_gamma", "branch_id", "rho_aa", "stable"};
    if (with_gamma)
        header.push_back("Gamma_over_gamma");
    writer.set_header(header);
    for (const BranchPoint& p : points) {
        std::vector<std::string> row = {format_number(p.omega), std::to_string(p.branch_id),
                                        format_number(p.rho_aa), p.stable ? "1" : "0"};
        if (with_gamma)
            row.push_back(format_number(p.gamma_collective));
        writer.add_row_mixed(row);
    }
    const std::string path = output_path(config, "bistability.csv");
    writer.write(path);
    result.output_files.push_back(path);
    return result;
}

RunResult run_rates(const RunConfig& config) {
    RunResult result;
    AtomicState state;
    state.rho_aa = config.rates_rho_aa;
    const double doppler = config.groups.doppler_width();
    QuadratureSpec spec;
    spec.absolute_tol = config.quad_tol;
    spec.relative_tol = config.quad_tol;
    const double avg = small_sample_rate_averaged(state, config.groups, spec);

    CsvWriter writer = make_writer(config);
    writer.add_metadata("gamma_avg_over_gamma", avg);
    writer.set_header({"delta_over_doppler", "gamma_spectral_over_gamma"});
    for (int i = 0; i < config.spectrum_points; ++i) {
        const double x = -config.span_doppler +
                         2.0 * config.span_doppler * i / (config.spectrum_points - 1);
        writer.add_row({x, small_sample_rate_spectral(state, x * doppler, config.groups)});
    }
    const std::string path = output_path(config, "rates.csv");
    writer.write(path);
    result.output_files.push_back(path);
    return result;
}

} // namespace

RunResult run_scenario(const RunConfig& config) {
    switch (config.scenario) {
    case Scenario::decay:
        return run_decay(config);
    case Scenario::spectrum:
        return run_spectrum(config);
    case Scenario::holstein:
        return run_holstein(config);
    case Scenario::bistability:
        return run_bistability(config);
    case Scenario::rates:
        return run_rates(config);
    }
    throw std::logic_error("unhandled scenario");
}

std::string validate_report(const RunConfig& config) {
    std::string report = "configuration OK\nscenario = " + to_string(config.scenario) + "\n";
    if (config.has_medium) {
        report += "resolved dimensionless groups:\n";
        report += "  g     = " + format_number(config.groups.g) + "\n";
        report += "  eta   = " + format_number(config.groups.eta) + "\n";
        report += "  C     = " + format_number(config.groups.cooperativity) + "\n";
        report += "  r     = " + format_number(config.groups.r) + "\n";
        report += "  kappa = " + format_number(config.groups.kappa) + "\n";
    }
    if (config.scenario == Scenario::bistability) {
        report += "bistability: C = " + format_number(config.bistability.cooperativity) +
                  ", r = " + format_number(config.bistability.slab_parameter) +
                  ", gamma*/gamma = " + format_number(config.bistability.gamma_star_ratio) + "\n";
    }
    if (config.scenario == Scenario::holstein)
        report += "holstein: kappa = " + format_number(config.kappa) + "\n";
    return report;
}

} // namespace dense_bloch
