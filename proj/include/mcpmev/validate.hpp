#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mcpmev::validate {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Options {
    std::uint64_t seed = 20250809;
    /// Scales Monte Carlo trial counts; 1.0 is the full suite.
    double trial_scale = 1.0;
    int threads = 1;
};

/// Runs the full analytic-vs-oracle validation suite and returns one result
/// per criterion.
std::vector<CriterionResult> run_acceptance(const Options& opt = {});

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace mcpmev::validate
