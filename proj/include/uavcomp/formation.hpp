#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace uavcomp {

// Intrinsic agent dynamics f(t, x, v) -> acceleration.
using AgentDynamics = std::function<Eigen::Vector3d(double, const Eigen::Vector3d&, const Eigen::Vector3d&)>;

// 1e-4 * [1, 1/(y^2+1), z - 150]
AgentDynamics case_study_dynamics();
AgentDynamics zero_dynamics();

// L = D - A with D the diagonal of row sums.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian(
    const Eigen::MatrixBase<Derived>& a) {
    using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    M l = -a;
    l.diagonal() += a.rowwise().sum();
    return l;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& s, double tol = 1e-15, int max_sweeps = 100);

struct GainSegment {
    double t_start;
    double gain;
};

struct SwarmParams {
    Eigen::MatrixXd adjacency;  // n x n, zero diagonal
    Eigen::VectorXd pinning;    // diagonal of B
    std::vector<GainSegment> schedule;
    Eigen::MatrixX3d offsets;  // row i: desired position of follower i relative to the leader
    AgentDynamics dynamics = zero_dynamics();
    double speed_cap = 0.0;  // m/s; 0 disables saturation

    Eigen::Index followers() const { return adjacency.rows(); }
    double gain_at(double t) const;
};

void validate(const SwarmParams& p);

struct SwarmState {
    double t = 0.0;
    Eigen::Vector3d leader_pos = Eigen::Vector3d::Zero();
    Eigen::Vector3d leader_vel = Eigen::Vector3d::Zero();
    Eigen::MatrixX3d follower_pos;
    Eigen::MatrixX3d follower_vel;
};

struct Theorem1Report {
    Eigen::VectorXd q;
    Eigen::VectorXd p_diag;
    Eigen::MatrixXd Q;
    double lambda_max_p = 0.0;
    double lambda_min_q = 0.0;
    double d = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double c_min = 0.0;
    std::vector<bool> satisfied_for;
    bool all_satisfied() const;
};

Theorem1Report theorem1_check(const Eigen::MatrixXd& l, const Eigen::VectorXd& pinning, double rho1, double rho2,
                              const std::vector<GainSegment>& schedule);

struct FlightEnvelope {
    Eigen::Vector3d pos_lo{-2000.0, -2000.0, 0.0};
    Eigen::Vector3d pos_hi{2000.0, 2000.0, 300.0};
    double max_speed = 20.0;
};

struct LipschitzEstimate {
    double rho1 = 0.0;  // sup of the position Jacobian's spectral norm over samples
    double rho2 = 0.0;  // same for the velocity Jacobian
};

LipschitzEstimate estimate_lipschitz(const AgentDynamics& f, const FlightEnvelope& env, int samples,
                                     std::uint64_t seed);

// One RK4 step of the leader and the pinned followers. The gain is frozen at
// the value in force at the start of the step.
SwarmState step_formation(const SwarmParams& p, const SwarmState& s, double dt);

struct NoiseSpec {
    double intensity = 0.0;  // std-dev rate of each entry of the coupling perturbation
    std::uint64_t seed = 0;
};

// Per-follower errors x_i - x_0 - x*_i and v_i - v_0.
struct FormationErrors {
    double t = 0.0;
    Eigen::MatrixX3d pos;
    Eigen::MatrixX3d vel;
};

FormationErrors formation_errors(const SwarmParams& p, const SwarmState& s);

struct FormationRun {
    std::vector<SwarmState> samples;  // every `stride` steps, first and last always kept
    std::vector<FormationErrors> errors;
    bool diverged = false;
    std::string diagnostic;
};

FormationRun simulate_formation(const SwarmParams& p, const SwarmState& init, double t_end, double dt,
                                int stride = 100, const NoiseSpec& noise = {});

}  // namespace uavcomp
