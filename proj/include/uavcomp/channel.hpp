#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uavcomp/geometry.hpp"
#include "uavcomp/rng.hpp"

namespace uavcomp {

struct FadingParams {
    double m = 2.0;      // Nakagami shape, m >= 1/2
    double omega = 1.0;  // mean power E[|h|^2]

    // E|h| = Gamma(m + 1/2) / Gamma(m) * sqrt(omega / m)
    double mean_amplitude() const;
};

void validate(const FadingParams& p);

double sample_nakagami_amplitude(const FadingParams& p, Engine& rng);
double sample_interference_power(const FadingParams& p, Engine& rng);

struct SirSample {
    double signal;        // (sum of coherent amplitudes)^2
    double interference;  // sum of interfering powers
    double sir;
};

// Per-UAV fading realisations: amplitude for coherent service, power when interfering.
struct FadingDraw {
    Eigen::VectorXd amplitude;
    Eigen::VectorXd power;
};

FadingDraw sample_fading(const FadingParams& p, Eigen::Index n, Engine& rng);

// SIR at a ground UE for a given serving set; every other UAV interferes.
// Distances are 3D slant ranges using each UAV's own altitude.
SirSample assemble_sir(const Deployment& dep, std::span<const Eigen::Index> serving,
                       const Eigen::Vector3d& ue, double alpha, const FadingDraw& fading);

SirSample compute_sir(const Deployment& dep, const CompSet& comp, const Eigen::Vector3d& ue, double alpha,
                      const FadingParams& fading, std::uint64_t seed);

}  // namespace uavcomp
