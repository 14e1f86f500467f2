#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uavcomp/rng.hpp"

namespace uavcomp {

struct HeightLaw {
    enum class Kind { uniform, fixed };
    Kind kind = Kind::uniform;
    double h_min = 50.0;
    double h_max = 300.0;

    static HeightLaw uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
    static HeightLaw fixed(double h) { return {Kind::fixed, h, h}; }

    bool degenerate() const { return kind == Kind::fixed || h_max == h_min; }
    double mean() const { return 0.5 * (h_min + h_max); }
    double sample(Engine& rng) const;
};

// Admissible altitude band for deployments; widen it to study other regimes.
struct HeightLimits {
    double lo = 50.0;
    double hi = 300.0;
};

void validate(const HeightLaw& law, const HeightLimits& limits = {});

std::vector<double> sample_heights(std::size_t n, const HeightLaw& law, Engine& rng);

struct DeploymentSpec {
    double density = 16e-6;         // per m^2
    double region_radius = 3000.0;  // m
    double margin = 1.2;            // sampling disk radius / region radius
    HeightLaw heights{};
    HeightLimits limits{};
    std::size_t min_count = 5;  // serving set plus at least one interferer
    int max_resamples = 1000;
};

struct Deployment {
    Eigen::MatrixX2d planar;  // row i: horizontal position of UAV i
    Eigen::VectorXd heights;
    double sampling_radius = 0.0;
    double density = 0.0;
    std::uint64_t seed = 0;
    int resamples = 0;

    Eigen::Index size() const { return planar.rows(); }
    Eigen::Vector3d position(Eigen::Index i) const { return {planar(i, 0), planar(i, 1), heights(i)}; }
};

void validate(const DeploymentSpec& spec);

// Homogeneous PPP on a disk of radius margin * region_radius with i.i.d. heights.
// Redraws (counted in `resamples`) while fewer than min_count points land.
Deployment sample_deployment(const DeploymentSpec& spec, std::uint64_t seed);
Deployment sample_deployment(const DeploymentSpec& spec, Engine& rng);

enum class DistanceMode { horizontal, slant };

// The k UAVs nearest to a ground UE at `ue`, ties resolved by lower index.
std::vector<Eigen::Index> nearest_uavs(const Deployment& dep, const Eigen::Vector2d& ue, std::size_t k,
                                       DistanceMode mode = DistanceMode::horizontal);

struct CompSet {
    std::array<Eigen::Index, 4> indices{};
    std::array<double, 4> distances{};  // in the metric of `mode`, ascending
    DistanceMode mode = DistanceMode::horizontal;
};

CompSet select_comp_set(const Deployment& dep, const Eigen::Vector2d& ue,
                        DistanceMode mode = DistanceMode::horizontal);

// Triangles are counter-clockwise index triples into the input rows.
struct Triangulation {
    std::vector<std::array<int, 3>> triangles;
};

Triangulation delaunay(const Eigen::MatrixX2d& points);

// Sign of the in-circle determinant: > 0 when d is strictly inside the
// circumcircle of the counter-clockwise triangle (a, b, c).
int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d);
int orientation(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

// Three vertices of a random Delaunay cell plus its centroid, each with an altitude.
// The vertices keep their deployment heights; the centroid draws a fresh one.
std::array<Eigen::Vector3d, 4> formation_target(const Deployment& dep, const Triangulation& tri,
                                                const HeightLaw& law, Engine& rng);

void write_deployment_csv(std::ostream& os, const Deployment& dep);
Deployment read_deployment_csv(std::istream& is);

}  // namespace uavcomp
