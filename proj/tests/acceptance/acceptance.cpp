// One line per acceptance criterion; exit status 1 if any selected criterion fails.
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "uavcomp/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> ids;
    uavcomp::VerifyOptions opts;
    app.add_option("--criterion", ids, "criterion id (repeatable; default all)")
        ->check(CLI::Range(1, uavcomp::criterion_count));
    app.add_option("--seed", opts.seed, "master seed");
    app.add_option("--trials", opts.trials, "Monte-Carlo trials per curve")->check(CLI::PositiveNumber);
    app.add_option("--threads", opts.threads, "worker threads (0 = all cores)");
    CLI11_PARSE(app, argc, argv);
    if (ids.empty())
        for (int i = 1; i <= uavcomp::criterion_count; ++i) ids.push_back(i);

    int failed = 0;
    for (int id : ids) {
        const uavcomp::CriterionResult r = uavcomp::run_criterion(id, opts);
        std::cout << uavcomp::format_result(r) << std::endl;
        failed += !r.pass;
    }
    std::cout << ids.size() - failed << "/" << ids.size() << " criteria passed\n";
    return failed ? 1 : 0;
}
