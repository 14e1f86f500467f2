#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uavcomp {

struct VerifyOptions {
    std::uint64_t seed = 42;
    std::size_t trials = 100000;  // Monte-Carlo trials per curve
    unsigned threads = 0;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<std::string> details;  // one measured quantity per entry
    double seconds = 0.0;
};

constexpr int criterion_count = 9;

std::string criterion_title(int id);

CriterionResult run_criterion(int id, const VerifyOptions& opts);

// "[PASS] 5 formation convergence (3.1 s): ..." on one line.
std::string format_result(const CriterionResult& r);

}  // namespace uavcomp
