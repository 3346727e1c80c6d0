#pragma once

// Shared test scaffolding: deterministic draws, small file parsers, and the
// CLI process driver used by the end-to-end suites.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <speclens/axis.hpp>

namespace testutil {

// The standard <random> distributions are not bit-stable across library
// versions, so draws are hand-rolled on top of mt19937_64.
struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    std::mt19937_64 gen;

    double uniform() {  // (0, 1]
        return (static_cast<double>(gen() >> 11) + 1.0) * 0x1p-53;
    }
    double symmetric() { return 2.0 * uniform() - 1.0; }
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    double poisson(double lambda) {
        if (!(lambda > 0)) return 0.0;
        if (lambda > 256.0)
            return std::max(0.0, std::round(lambda + std::sqrt(lambda) * normal()));
        const double limit = std::exp(-lambda);
        double product = uniform();
        double k = 0.0;
        while (product > limit) {
            product *= uniform();
            k += 1.0;
        }
        return k;
    }
};

inline speclens::ArrayXc<double> random_complex(Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    speclens::ArrayXc<double> samples(n);
    for (Eigen::Index i = 0; i < n; ++i)
        samples[i] = std::complex<double>(rng.symmetric(), rng.symmetric());
    return samples;
}

// Linear-interpolated full width at half maximum of a sampled curve.
inline double fwhm_xy(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t peak = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[peak]) peak = i;
    const double half = y[peak] / 2.0;
    std::size_t i = peak;
    while (i > 0 && y[i - 1] > half) --i;
    const double left = (i == 0) ? x[0]
                                 : x[i - 1] + (x[i] - x[i - 1]) * (half - y[i - 1]) / (y[i] - y[i - 1]);
    std::size_t j = peak;
    while (j + 1 < y.size() && y[j + 1] > half) ++j;
    const double right = (j + 1 == y.size())
                             ? x.back()
                             : x[j] + (x[j + 1] - x[j]) * (y[j] - half) / (y[j] - y[j + 1]);
    return right - left;
}

inline double fwhm_xy(const speclens::ArrayX<double>& x, const speclens::ArrayX<double>& y) {
    return fwhm_xy(std::vector<double>(x.data(), x.data() + x.size()),
                   std::vector<double>(y.data(), y.data() + y.size()));
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::map<std::string, std::string> read_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_kv: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline double kv_num(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("missing key " + key);
    return std::stod(it->second);
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return columns[i];
        throw std::runtime_error("missing column " + name);
    }
};

inline Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    Csv csv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::stringstream row(line);
        std::string field;
        if (csv.header.empty()) {
            while (std::getline(row, field, ',')) csv.header.push_back(trim(field));
            csv.columns.resize(csv.header.size());
            continue;
        }
        std::size_t c = 0;
        while (std::getline(row, field, ',') && c < csv.columns.size())
            csv.columns[c++].push_back(std::stod(field));
    }
    return csv;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string fresh_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("speclens_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace testutil

#ifdef SPECLENS_CLI_PATH
#include <sys/wait.h>

namespace testutil {

// Runs the built binary; stdout/stderr land in the given files.
inline int run_cli(const std::string& args, const std::string& out_file = "/dev/null",
                   const std::string& err_file = "/dev/null") {
    const std::string cmd =
        std::string(SPECLENS_CLI_PATH) + " " + args + " >" + out_file + " 2>" + err_file;
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

}  // namespace testutil
#endif
