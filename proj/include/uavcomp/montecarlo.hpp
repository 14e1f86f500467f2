#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uavcomp/analytic.hpp"
#include "uavcomp/channel.hpp"
#include "uavcomp/geometry.hpp"

namespace uavcomp {

struct Scheme {
    enum class Kind { proposed, conventional, no_comp };
    Kind kind = Kind::proposed;
    int n = 4;                   // serving set size for conventional
    bool distance_only = false;  // conventional ranking by slant range instead of received power

    static Scheme proposed() { return {}; }
    static Scheme conventional(int n, bool distance_only = false) { return {Kind::conventional, n, distance_only}; }
    static Scheme no_comp() { return {Kind::no_comp, 1, false}; }

    // proposed_delaunay4, conventional_<n>[_distance], no_comp
    std::string name() const;
    static Scheme parse(const std::string& name);
};

struct McConfig {
    std::size_t trials = 100000;
    std::uint64_t master_seed = 42;
    NetworkParams network{};
    double region_radius = 3000.0;  // UAVs are drawn on margin * region_radius
    double margin = 1.2;
    Scheme scheme{};
    std::vector<double> gamma_grid{};  // linear thresholds, strictly increasing
    unsigned threads = 0;              // 0 = hardware concurrency
};

void validate(const McConfig& cfg);

DeploymentSpec deployment_spec(const McConfig& cfg);

// One trial's randomness: the deployment and a fading draw per UAV.
struct TrialDraw {
    Deployment deployment;
    FadingDraw fading;
};

TrialDraw draw_trial(const McConfig& cfg, std::uint64_t trial_index);

std::vector<Eigen::Index> serving_set(const TrialDraw& draw, const Scheme& scheme, double alpha);

SirSample evaluate_trial(const TrialDraw& draw, const Scheme& scheme, double alpha);

// Deterministic per (master_seed, trial_index).
SirSample run_trial(const McConfig& cfg, std::uint64_t trial_index);

// Samples for several schemes and path-loss exponents sharing every draw.
struct BatchResult {
    std::vector<Scheme> schemes;
    std::vector<double> alphas;
    // samples[s * alphas.size() + a][trial]
    std::vector<std::vector<SirSample>> samples;
    long resamples = 0;

    const std::vector<SirSample>& at(std::size_t scheme, std::size_t alpha) const {
        return samples[scheme * alphas.size() + alpha];
    }
};

BatchResult run_batch(const McConfig& cfg, const std::vector<Scheme>& schemes, const std::vector<double>& alphas);

struct MetricEstimate {
    double value = 0.0;
    double std_err = 0.0;
    std::size_t trials_used = 0;
};

std::vector<MetricEstimate> coverage_from_samples(const std::vector<SirSample>& samples,
                                                  const std::vector<double>& gamma_grid);
MetricEstimate rate_from_samples(const std::vector<SirSample>& samples);

std::vector<MetricEstimate> estimate_coverage(const McConfig& cfg);
MetricEstimate estimate_rate(const McConfig& cfg);

struct BinSpec {
    int bins = 100;
    double lo = 0.0;  // lo == hi: take the sample range
    double hi = 0.0;
    bool log_spaced = false;
};

struct Histogram {
    Eigen::VectorXd edges;    // bins + 1
    Eigen::VectorXd density;  // integrates to 1 over [edges.front(), edges.back()]
    std::size_t outside = 0;  // samples beyond the requested range, excluded
};

Histogram empirical_pdf(const std::vector<double>& samples, const BinSpec& spec);

// sup_x |F_n(x) - F(x)| over the jump points of the empirical CDF. With
// max_points > 0, F is evaluated on that many evenly spaced order statistics only.
double sup_cdf_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                        std::size_t max_points = 0);

std::vector<double> extract(const std::vector<SirSample>& samples, double SirSample::*field);

}  // namespace uavcomp
