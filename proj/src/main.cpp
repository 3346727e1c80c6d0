#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"
#include "speclens/optimizer.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<double> gamma_c_mhz;
    std::optional<double> detuning_mhz;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "flat key = value config file");
    cmd->add_option("--out", flags.out_dir, "output directory (overrides output.directory)");
    cmd->add_option("--gamma-c-mhz", flags.gamma_c_mhz, "cavity linewidth, FWHM MHz");
    cmd->add_option("--detuning-mhz", flags.detuning_mhz, "packet-cavity detuning, MHz");
}

speclens::RunConfig resolve_config(const CommonFlags& flags) {
    speclens::RunConfig config = flags.config_path.empty()
                                     ? speclens::RunConfig{}
                                     : speclens::load_run_config(flags.config_path);
    if (!flags.out_dir.empty()) config.output.directory = flags.out_dir;
    if (flags.gamma_c_mhz) config.cavity.gamma_c_mhz = *flags.gamma_c_mhz;
    if (flags.detuning_mhz) config.cavity.detuning_mhz = *flags.detuning_mhz;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavity-based spectral compression of narrowband single photons"};
    app.require_subcommand(1);

    CommonFlags common;
    bool no_modulator = false;
    speclens::OptimizeOptions optimize_options;
    speclens::ScanOptions scan_options;
    speclens::FitOptions fit_options;

    auto* simulate = app.add_subcommand(
        "simulate", "run the compression pipeline and export plot-ready CSV");
    add_common(simulate, common);
    simulate->add_flag("--no-modulator", no_modulator,
                       "stop after the cavity; skip the phase modulator");

    auto* optimize = app.add_subcommand(
        "optimize", "minimize the compressed bandwidth over the cavity parameters");
    add_common(optimize, common);
    optimize->add_option("--gamma-c-min", optimize_options.gamma_c_min,
                         "lower cavity-linewidth bound, units of gamma_p");
    optimize->add_option("--gamma-c-max", optimize_options.gamma_c_max,
                         "upper cavity-linewidth bound, units of gamma_p");
    optimize->add_option("--gamma-c-points", optimize_options.gamma_c_points,
                         "coarse-grid points along gamma_c");
    optimize->add_option("--detuning-min", optimize_options.detuning_min,
                         "lower detuning bound, units of gamma_p");
    optimize->add_option("--detuning-max", optimize_options.detuning_max,
                         "upper detuning bound, units of gamma_p");
    optimize->add_option("--detuning-points", optimize_options.detuning_points,
                         "coarse-grid points along the detuning");
    optimize->add_flag("--free-flip", optimize_options.free_flip,
                       "search the flip time instead of using the analytic value");
    optimize->add_option("--flip-min", optimize_options.flip_min,
                         "lower flip-time bound, units of 1/gamma_p (with --free-flip)");
    optimize->add_option("--flip-max", optimize_options.flip_max,
                         "upper flip-time bound, units of 1/gamma_p (with --free-flip)");
    optimize->add_option("--flip-points", optimize_options.flip_points,
                         "coarse-grid points along the flip time (with --free-flip)");

    auto* scan_fp = app.add_subcommand(
        "scan-fp", "scanning-cavity transmission of the uncompressed and compressed packets");
    add_common(scan_fp, common);
    scan_fp->add_option("--scan-points", scan_options.points, "number of filter detunings");
    scan_fp->add_option("--scan-half-width-mhz", scan_options.half_width_mhz,
                        "scan half-width in MHz (default 2 * gamma_p)");

    auto* fit_temporal = app.add_subcommand(
        "fit-temporal", "fit an exponential decay to a detection-time histogram");
    add_common(fit_temporal, common);
    fit_temporal->add_option("input", fit_options.input_path, "CSV with t_ns,intensity columns");
    fit_temporal->add_flag("--synth", fit_options.synth,
                           "generate a synthetic Poisson histogram instead of reading a file");
    fit_temporal->add_option("--seed", fit_options.seed, "synthetic-data RNG seed");

    auto* fit_spectrum = app.add_subcommand(
        "fit-spectrum", "fit the reabsorbed-emission model to a spectral scan");
    add_common(fit_spectrum, common);
    fit_spectrum->add_option("input", fit_options.input_path,
                             "CSV with detuning_mhz,rate columns");
    fit_spectrum->add_flag("--synth", fit_options.synth,
                           "generate a synthetic scan instead of reading a file");
    fit_spectrum->add_option("--seed", fit_options.seed, "synthetic-data RNG seed");
    fit_spectrum->add_option("--gamma-p-mhz", fit_options.gamma_p_mhz,
                             "emitter linewidth, FWHM MHz (default from config)");
    fit_spectrum->add_option("--gamma-a-mhz", fit_options.gamma_a_mhz,
                             "absorber linewidth, FWHM MHz");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const speclens::RunConfig config = resolve_config(common);
        if (simulate->parsed())
            speclens::cmd_simulate(config, no_modulator);
        else if (optimize->parsed())
            speclens::cmd_optimize(config, optimize_options);
        else if (scan_fp->parsed())
            speclens::cmd_scan_fp(config, scan_options);
        else if (fit_temporal->parsed())
            speclens::cmd_fit_temporal(config, fit_options);
        else if (fit_spectrum->parsed())
            speclens::cmd_fit_spectrum(config, fit_options);
        return 0;
    } catch (const speclens::optimization_failed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const speclens::non_convergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
