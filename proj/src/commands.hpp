#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "run_config.hpp"

namespace speclens {

// Fit or optimization finished without meeting its convergence test.
struct non_convergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Search-space bounds in units of gamma_p (flip time in 1/gamma_p).
struct OptimizeOptions {
    double gamma_c_min = 0.05;
    double gamma_c_max = 1.0;
    double detuning_min = -0.5;
    double detuning_max = 0.5;
    double flip_min = 0.5;
    double flip_max = 5.0;
    int gamma_c_points = 25;
    int detuning_points = 21;
    int flip_points = 1;
    bool free_flip = false;
};

struct ScanOptions {
    int points = 1601;
    double half_width_mhz = 0.0;  // <= 0 selects 2 * gamma_p_mhz
};

struct FitOptions {
    std::string input_path;  // empty when --synth
    bool synth = false;
    std::uint64_t seed = 1;
    std::optional<double> gamma_p_mhz;  // fit-spectrum; defaults to config photon width
    double gamma_a_mhz = 6.06;          // fit-spectrum absorber width
};

void cmd_simulate(const RunConfig& config, bool no_modulator);
void cmd_optimize(const RunConfig& config, const OptimizeOptions& options);
void cmd_scan_fp(const RunConfig& config, const ScanOptions& options);
void cmd_fit_temporal(const RunConfig& config, const FitOptions& options);
void cmd_fit_spectrum(const RunConfig& config, const FitOptions& options);

}  // namespace speclens
