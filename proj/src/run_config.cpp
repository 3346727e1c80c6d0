#include "run_config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace speclens {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& context) {
    std::size_t consumed = 0;
    double parsed = 0;
    try {
        parsed = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument(context + ": expected a number, got '" + value + "'");
    }
    if (consumed != value.size())
        throw std::invalid_argument(context + ": expected a number, got '" + value + "'");
    return parsed;
}

std::uint64_t parse_count(const std::string& value, const std::string& context) {
    std::size_t consumed = 0;
    unsigned long long parsed = 0;
    try {
        parsed = std::stoull(value, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument(context + ": expected a positive integer, got '" + value + "'");
    }
    if (consumed != value.size() || value.front() == '-')
        throw std::invalid_argument(context + ": expected a positive integer, got '" + value + "'");
    return parsed;
}

std::string fmt_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void assign_config_key(RunConfig& config, const std::string& key, const std::string& value,
                       const std::string& context) {
    if (key == "photon.gamma_p_mhz")
        config.photon.gamma_p_mhz = parse_double(value, context);
    else if (key == "photon.t0_ns")
        config.photon.t0_ns = parse_double(value, context);
    else if (key == "cavity.gamma_c_mhz")
        config.cavity.gamma_c_mhz = parse_double(value, context);
    else if (key == "cavity.detuning_mhz")
        config.cavity.detuning_mhz = parse_double(value, context);
    else if (key == "fp.gamma_fp_mhz")
        config.fp.gamma_fp_mhz = parse_double(value, context);
    else if (key == "grid.n_samples")
        config.grid.n_samples = parse_count(value, context);
    else if (key == "grid.time_span_factor")
        config.grid.time_span_factor = parse_double(value, context);
    else if (key == "output.directory")
        config.output.directory = value;
    else if (key == "output.format")
        config.output.format = value;
    else
        throw std::invalid_argument(context + ": unknown key '" + key + "'");
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    RunConfig config;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string context = path + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(context + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument(context + ": empty key");
        assign_config_key(config, key, value, context);
    }
    return config;
}

void validate(const RunConfig& config) {
    if (!(config.photon.gamma_p_mhz > 0))
        throw std::invalid_argument("photon.gamma_p_mhz must be > 0");
    if (!(config.cavity.gamma_c_mhz > 0))
        throw std::invalid_argument("cavity.gamma_c_mhz must be > 0");
    if (!(config.fp.gamma_fp_mhz > 0))
        throw std::invalid_argument("fp.gamma_fp_mhz must be > 0");
    const auto n = config.grid.n_samples;
    if (n < 16 || (n & (n - 1)) != 0)
        throw std::invalid_argument("grid.n_samples must be a power of two >= 16");
    if (!(config.grid.time_span_factor > 0))
        throw std::invalid_argument("grid.time_span_factor must be > 0");
    if (config.output.format != "csv")
        throw std::invalid_argument("output.format: only 'csv' is supported");
}

std::string canonical_text(const RunConfig& config) {
    std::string text;
    text += "photon.gamma_p_mhz = " + fmt_full(config.photon.gamma_p_mhz) + "\n";
    text += "photon.t0_ns = " + fmt_full(config.photon.t0_ns) + "\n";
    text += "cavity.gamma_c_mhz = " + fmt_full(config.cavity.gamma_c_mhz) + "\n";
    text += "cavity.detuning_mhz = " + fmt_full(config.cavity.detuning_mhz) + "\n";
    text += "fp.gamma_fp_mhz = " + fmt_full(config.fp.gamma_fp_mhz) + "\n";
    text += "grid.n_samples = " + std::to_string(config.grid.n_samples) + "\n";
    text += "grid.time_span_factor = " + fmt_full(config.grid.time_span_factor) + "\n";
    text += "output.directory = " + config.output.directory + "\n";
    text += "output.format = " + config.output.format + "\n";
    return text;
}

std::string config_hash_hex(const RunConfig& config) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const unsigned char c : canonical_text(config)) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace speclens
