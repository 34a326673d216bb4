#pragma once

#include <string>
#include <vector>

namespace critspde {

struct VerifyOptions {
    int threads = 0;  // 0 picks std::thread::hardware_concurrency()
};

struct SuiteResult {
    std::string name;
    int criterion = 0;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Acceptance suites in criterion order: exponents, critical-weight,
// identities, interpolation, chain, heat, noise, energy, drift, regularity,
// determinism, decision-trees.
std::vector<std::string> suite_names();

// Runs one suite; an exception inside the suite becomes a failing result.
SuiteResult run_suite(const std::string& name, const VerifyOptions& opt = {});

std::string format_result(const SuiteResult& r);

}  // namespace critspde
