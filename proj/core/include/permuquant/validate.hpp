#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace permuquant {

// Self-contained randomized check suites, also wired into the CLI.
//   bounds    worst-case error bound vs measured error
//   sorting   sorted proxy objective vs exhaustive partition minimum
//   folding   permutation folding through norms and a preceding linear
//   hadamard  orthonormality, involution, product reconstruction
//   sandwich  noise-model bracketing by the proxy objective
enum class Suite { bounds, sorting, folding, hadamard, sandwich };

Suite suite_from_name(const std::string& name);  // throws std::invalid_argument
const char* suite_name(Suite suite);

struct SuiteResult {
    std::string name;
    std::size_t trials = 0;
    std::size_t failures = 0;
    // Most adverse margin observed, oriented so that <= 0 is healthy.
    double worst_slack = 0.0;
    bool passed = false;
    std::vector<std::string> notes;
};

SuiteResult run_validation_suite(Suite suite, std::uint64_t seed);

}  // namespace permuquant
