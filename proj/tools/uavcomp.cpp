#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "uavcomp/error.hpp"
#include "uavcomp/geometry.hpp"
#include "uavcomp/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"UAV CoMP swarm simulator: formation, tracking and coverage experiments"};
    app.require_subcommand(1);

    std::string target;
    uavcomp::RunOptions opts;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    unsigned threads = 0;
    std::string out = "out";
    auto* run = app.add_subcommand("run", "run a preset (fig4..fig8, verify) or a JSON scenario file");
    run->add_option("scenario", target, "preset name or config path")->required();
    auto* seed_opt = run->add_option("--seed", seed, "master seed");
    auto* trials_opt = run->add_option("--trials", trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    auto* threads_opt = run->add_option("--threads", threads, "worker threads (0 = all cores)");
    run->add_option("--out", out, "output directory");
    run->add_option("--set", opts.overrides, "key.path=value override (repeatable)")->take_all();

    std::uint64_t dep_seed = 42;
    double density = 16.0, radius = 3000.0, margin = 1.2;
    std::string dep_out;
    auto* deploy = app.add_subcommand("deploy", "sample one UAV deployment and write it as CSV");
    deploy->add_option("--seed", dep_seed, "seed");
    deploy->add_option("--density-per-km2", density, "UAV density")->check(CLI::PositiveNumber);
    deploy->add_option("--region-radius-m", radius, "region radius")->check(CLI::PositiveNumber);
    deploy->add_option("--margin", margin, "sampling disk / region radius")->check(CLI::Range(1.0, 10.0));
    deploy->add_option("--out", dep_out, "CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (*run) {
        if (*seed_opt) opts.seed = seed;
        if (*trials_opt) opts.trials = trials;
        if (*threads_opt) opts.threads = threads;
        opts.out_dir = out;
        return uavcomp::run_scenario(target, opts, std::cout);
    }

    try {
        uavcomp::DeploymentSpec spec;
        spec.density = density * 1e-6;
        spec.region_radius = radius;
        spec.margin = margin;
        const uavcomp::Deployment dep = uavcomp::sample_deployment(spec, dep_seed);
        if (dep_out.empty()) {
            uavcomp::write_deployment_csv(std::cout, dep);
        } else {
            std::ofstream os(dep_out);
            if (!os) throw std::runtime_error("cannot write " + dep_out);
            uavcomp::write_deployment_csv(os, dep);
        }
    } catch (const uavcomp::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
