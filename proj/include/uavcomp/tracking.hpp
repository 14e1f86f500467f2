#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uavcomp/formation.hpp"

namespace uavcomp {

struct TargetState {
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    Eigen::Vector3d vel = Eigen::Vector3d::Zero();
};

// Either a constant-speed polyline (velocity takes the incoming tangent at a
// corner, zero after the last waypoint) or a second-order ODE driven by g.
class TargetModel {
public:
    static TargetModel waypoint_path(std::vector<Eigen::Vector3d> points, double speed);
    static TargetModel dynamics(TargetState initial, AgentDynamics g);

    bool is_path() const { return !g_; }
    TargetState initial() const;
    // Closed form for paths; RK4 from `from` for the ODE kind.
    TargetState advance(const TargetState& from, double t_from, double dt) const;
    TargetState path_state(double t) const;
    const std::vector<Eigen::Vector3d>& points() const { return points_; }
    double speed() const { return speed_; }

private:
    std::vector<Eigen::Vector3d> points_;
    std::vector<double> arrival_;  // time the path reaches each waypoint
    double speed_ = 0.0;
    TargetState init_;
    AgentDynamics g_;
};

// Zigzag ground track lifted to `altitude`: 45 degree legs switching heading at t = 20 s and 25 s.
TargetModel case_study_zigzag(double speed = 10.0, double altitude = 150.0);

enum class Q0Membership { position_and_velocity, position_only };

struct ImpulsiveParams {
    double interval = 0.02;  // tau, s
    Eigen::Vector3d dx_max = Eigen::Vector3d::Constant(5.0);
    Eigen::Vector3d dv_max = Eigen::Vector3d::Constant(10.0);
    double r0 = 10.0;               // radius bounding initial errors; enters R_Q
    double membership_radius = 0.0;  // agents with errors inside this radius get no impulse
    Q0Membership membership = Q0Membership::position_and_velocity;
    double rho = 1.3;
    double max_strength = 1.0;  // cap on the common control strength
    double epsilon = 1e-9;      // slack added to R_Q
};

void validate(const ImpulsiveParams& p);

// Per-agent ratio: min over axes of delta / |gap|; +inf when every gap is zero.
double control_ratio(const Eigen::Vector3d& pos_gap, const Eigen::Vector3d& vel_gap, const Eigen::Vector3d& dx_max,
                     const Eigen::Vector3d& dv_max);

bool inside_q0(const Eigen::Vector3d& pos_gap, const Eigen::Vector3d& vel_gap, const ImpulsiveParams& p);

// Control strength per agent (index 0 = leader): one common value, the minimum
// ratio over agents outside Q0 clamped to [0, max_strength]; zero inside Q0.
Eigen::VectorXd control_strength(const SwarmState& s, const TargetState& g, const Eigen::MatrixX3d& offsets,
                                 const ImpulsiveParams& p);

struct ImpulseRecord {
    double t;
    int agent;
    double ell;
    Eigen::Vector3d dx, dv;
};

// Jump x_i -= ell_i (x_i - x*_i - x_g), v_i -= ell_i (v_i - v_g); leader uses x*_0 = 0.
SwarmState apply_impulse(const SwarmState& s, const TargetState& g, const Eigen::MatrixX3d& offsets,
                         const Eigen::VectorXd& ell, std::vector<ImpulseRecord>* log = nullptr);

// RK4 step with consensus coupling only (no pinning between impulses).
SwarmState step_between_impulses(const SwarmState& s, const SwarmParams& p, double dt);

struct DynamicsBounds {
    double f_followers = 0.0;  // ||F||_inf
    double f_leader = 0.0;     // ||f_0||_inf
    double g_target = 0.0;     // ||g||_inf
};

struct Theorem2Report {
    double eta = 0.0;
    double lambda_max_g = 0.0;  // lambda_max(G^T + G)
    double beta = 0.0;          // max over k of beta_k
    std::vector<double> beta_k;
    std::vector<double> condition_values;
    bool satisfied = false;
    double r_q = 0.0;
    double rho = 0.0;
    double rho_sup = 0.0;  // largest rho for which every condition holds
};

// beta_k = max(lambda_max(I + H^F), lambda_max(I + H^L)) = 1 - min_i ell_i.
double beta_from_strengths(const Eigen::VectorXd& ell);

Theorem2Report theorem2_check(const SwarmParams& swarm, const ImpulsiveParams& imp, const DynamicsBounds& bounds,
                              const std::vector<double>& impulse_times, const std::vector<Eigen::VectorXd>& strengths);

struct TrackingSample {
    double t;
    bool impulse;  // state recorded right after a jump
    SwarmState state;
    TargetState target;
    Eigen::MatrixX3d pos_err;  // rows: leader, followers
    Eigen::MatrixX3d vel_err;
};

struct TrackingRun {
    std::vector<TrackingSample> samples;
    std::vector<ImpulseRecord> impulses;
    std::vector<double> impulse_times;
    std::vector<Eigen::VectorXd> strengths;
    Theorem2Report report;
    bool bounds_respected = true;
    bool diverged = false;
    std::string diagnostic;
};

TrackingRun simulate_tracking(const SwarmParams& swarm, const ImpulsiveParams& imp, const TargetModel& target,
                              const SwarmState& init, double t_end, double dt, const DynamicsBounds& bounds,
                              int stride = 1);

}  // namespace uavcomp
