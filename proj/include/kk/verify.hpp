#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kk {

struct Check {
    int criterion;  // acceptance criterion number this check feeds
    std::string suite;
    std::string name;
    double value;      // measured error or statistic
    double threshold;  // pass iff value <= threshold
    bool pass;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    int threads = 1;
    std::size_t samples = 100000;      // Monte Carlo samples per geometry check
    std::uint64_t schatten_L = 1000000;
};

/// kernels, tyz, ml, hankel, mb, geometry, moments.
const std::vector<std::string>& verify_suites();

/// Runs one suite, or every suite in order for "all". Output depends only on
/// the options (threads never changes a value). std::invalid_argument for an
/// unknown suite name.
std::vector<Check> run_suite(const std::string& suite, const VerifyOptions& opts);

}  // namespace kk
