#pragma once

#include <cstdint>
#include <string>

namespace speclens {

inline constexpr const char* kToolVersion = "speclens 1.0.0";

// User-facing run configuration. All linewidths are FWHM in ordinary-frequency
// MHz; they convert to angular rad/s at the simulation boundary.
struct RunConfig {
    struct Photon {
        double gamma_p_mhz = 20.6;
        double t0_ns = 0.0;
    } photon;
    struct Cavity {
        double gamma_c_mhz = 7.3;
        double detuning_mhz = 0.0;
    } cavity;
    struct Fp {
        double gamma_fp_mhz = 2.6;
    } fp;
    struct Grid {
        std::uint64_t n_samples = 65536;
        double time_span_factor = 120.0;
    } grid;
    struct Output {
        std::string directory = ".";
        std::string format = "csv";
    } output;
};

// Parses a flat "key = value" file with section-dotted keys and '#' comments,
// overlaying the parsed values on the defaults. Unknown keys and malformed
// values raise std::invalid_argument carrying "path:line:".
RunConfig load_run_config(const std::string& path);

// Applies the same key = value assignment used by the file parser.
void assign_config_key(RunConfig& config, const std::string& key, const std::string& value,
                       const std::string& context);

void validate(const RunConfig& config);

// Canonical serialization: every key in fixed order, doubles at full precision.
// Basis of the manifest hash, so format changes invalidate stored hashes.
std::string canonical_text(const RunConfig& config);

// FNV-1a (64-bit) of canonical_text, as 16 hex digits.
std::string config_hash_hex(const RunConfig& config);

}  // namespace speclens
