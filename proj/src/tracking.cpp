#include "uavcomp/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "uavcomp/error.hpp"

namespace uavcomp {

TargetModel TargetModel::waypoint_path(std::vector<Eigen::Vector3d> points, double speed) {
    if (!(speed > 0.0)) throw ConfigError("target.speed_mps", "must be positive");
    if (points.size() < 2) throw ConfigError("target.waypoints", "need at least two waypoints");
    TargetModel m;
    m.arrival_.push_back(0.0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double len = (points[i] - points[i - 1]).norm();
        if (!(len > 0.0)) throw ConfigError("target.waypoints", "consecutive waypoints must differ");
        m.arrival_.push_back(m.arrival_.back() + len / speed);
    }
    m.points_ = std::move(points);
    m.speed_ = speed;
    m.init_ = m.path_state(0.0);
    return m;
}

TargetModel TargetModel::dynamics(TargetState initial, AgentDynamics g) {
    if (!g) throw ConfigError("target.dynamics", "missing");
    TargetModel m;
    m.init_ = initial;
    m.g_ = std::move(g);
    return m;
}

TargetState TargetModel::initial() const { return init_; }

TargetState TargetModel::path_state(double t) const {
    TargetState s;
    if (t >= arrival_.back()) {
        s.pos = points_.back();
        return s;
    }
    // Segment k covers (arrival_[k], arrival_[k+1]]; t = 0 belongs to the first.
    // Arrival times carry rounding from the leg lengths, so a corner hit on the
    // nose keeps the incoming leg.
    std::size_t k = 0;
    while (k + 2 < arrival_.size() && t > arrival_[k + 1] + 1e-12 * (1.0 + arrival_[k + 1])) ++k;
    const Eigen::Vector3d dir = (points_[k + 1] - points_[k]).normalized();
    s.pos = points_[k] + dir * speed_ * (t - arrival_[k]);
    s.vel = dir * speed_;
    return s;
}

TargetState TargetModel::advance(const TargetState& from, double t_from, double dt) const {
    if (is_path()) return path_state(t_from + dt);
    auto acc = [&](double t, const Eigen::Vector3d& x, const Eigen::Vector3d& v) { return g_(t, x, v); };
    const double h = 0.5 * dt;
    const Eigen::Vector3d k1x = from.vel, k1v = acc(t_from, from.pos, from.vel);
    const Eigen::Vector3d k2x = from.vel + h * k1v, k2v = acc(t_from + h, from.pos + h * k1x, from.vel + h * k1v);
    const Eigen::Vector3d k3x = from.vel + h * k2v, k3v = acc(t_from + h, from.pos + h * k2x, from.vel + h * k2v);
    const Eigen::Vector3d k4x = from.vel + dt * k3v,
                          k4v = acc(t_from + dt, from.pos + dt * k3x, from.vel + dt * k3v);
    TargetState out;
    out.pos = from.pos + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    out.vel = from.vel + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    return out;
}

TargetModel case_study_zigzag(double speed, double altitude) {
    const double s = speed / std::numbers::sqrt2;
    std::vector<Eigen::Vector3d> pts;
    pts.emplace_back(0.0, 0.0, altitude);
    pts.emplace_back(pts.back() + Eigen::Vector3d(s, s, 0.0) * 20.0);
    pts.emplace_back(pts.back() + Eigen::Vector3d(s, -s, 0.0) * 5.0);
    pts.emplace_back(pts.back() + Eigen::Vector3d(s, s, 0.0) * 100.0);
    return TargetModel::waypoint_path(std::move(pts), speed);
}

void validate(const ImpulsiveParams& p) {
    if (!(p.interval > 0.0) || !std::isfinite(p.interval)) throw ConfigError("impulse_interval_s", "must be positive");
    if ((p.dx_max.array() < 0.0).any()) throw ConfigError("dx_max_m", "must be non-negative");
    if ((p.dv_max.array() < 0.0).any()) throw ConfigError("dv_max_mps", "must be non-negative");
    if (p.r0 < 0.0) throw ConfigError("r0_m", "must be non-negative");
    if (p.membership_radius < 0.0) throw ConfigError("membership_radius_m", "must be non-negative");
    if (!(p.rho > 1.0)) throw ConfigError("rho", "must exceed 1");
    if (!(p.max_strength > 0.0 && p.max_strength <= 1.0))
        throw ConfigError("max_strength", "must lie in (0, 1]");
}

double control_ratio(const Eigen::Vector3d& pos_gap, const Eigen::Vector3d& vel_gap, const Eigen::Vector3d& dx_max,
                     const Eigen::Vector3d& dv_max) {
    double r = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        if (pos_gap(k) != 0.0) r = std::min(r, dx_max(k) / std::abs(pos_gap(k)));
        if (vel_gap(k) != 0.0) r = std::min(r, dv_max(k) / std::abs(vel_gap(k)));
    }
    return r;
}

bool inside_q0(const Eigen::Vector3d& pos_gap, const Eigen::Vector3d& vel_gap, const ImpulsiveParams& p) {
    const bool pos_in = pos_gap.norm() <= p.membership_radius;
    if (p.membership == Q0Membership::position_only) return pos_in;
    return pos_in && vel_gap.norm() <= p.membership_radius;
}

namespace {

void agent_gaps(const SwarmState& s, const TargetState& g, const Eigen::MatrixX3d& offsets, Eigen::MatrixX3d& pos,
                Eigen::MatrixX3d& vel) {
    const Eigen::Index n = s.follower_pos.rows();
    pos.resize(n + 1, 3);
    vel.resize(n + 1, 3);
    pos.row(0) = (s.leader_pos - g.pos).transpose();
    vel.row(0) = (s.leader_vel - g.vel).transpose();
    pos.bottomRows(n) = (s.follower_pos - offsets).rowwise() - g.pos.transpose();
    vel.bottomRows(n) = s.follower_vel.rowwise() - g.vel.transpose();
}

}  // namespace

Eigen::VectorXd control_strength(const SwarmState& s, const TargetState& g, const Eigen::MatrixX3d& offsets,
                                 const ImpulsiveParams& p) {
    Eigen::MatrixX3d pos, vel;
    agent_gaps(s, g, offsets, pos, vel);
    const Eigen::Index agents = pos.rows();
    std::vector<char> outside(agents, 0);
    double common = std::numeric_limits<double>::infinity();
    bool any = false;
    for (Eigen::Index i = 0; i < agents; ++i) {
        const Eigen::Vector3d pg = pos.row(i), vg = vel.row(i);
        if (inside_q0(pg, vg, p)) continue;
        outside[i] = 1;
        any = true;
        common = std::min(common, control_ratio(pg, vg, p.dx_max, p.dv_max));
    }
    Eigen::VectorXd ell = Eigen::VectorXd::Zero(agents);
    if (!any) return ell;
    common = std::clamp(common, 0.0, p.max_strength);
    for (Eigen::Index i = 0; i < agents; ++i)
        if (outside[i]) ell(i) = common;
    return ell;
}

SwarmState apply_impulse(const SwarmState& s, const TargetState& g, const Eigen::MatrixX3d& offsets,
                         const Eigen::VectorXd& ell, std::vector<ImpulseRecord>* log) {
    Eigen::MatrixX3d pos, vel;
    agent_gaps(s, g, offsets, pos, vel);
    if (ell.size() != pos.rows()) throw DomainError("apply_impulse: one strength per agent required");
    SwarmState out = s;
    for (Eigen::Index i = 0; i < pos.rows(); ++i) {
        const Eigen::Vector3d dx = -ell(i) * pos.row(i).transpose();
        const Eigen::Vector3d dv = -ell(i) * vel.row(i).transpose();
        if (i == 0) {
            out.leader_pos += dx;
            out.leader_vel += dv;
        } else {
            out.follower_pos.row(i - 1) += dx.transpose();
            out.follower_vel.row(i - 1) += dv.transpose();
        }
        if (log && ell(i) > 0.0) log->push_back({s.t, static_cast<int>(i), ell(i), dx, dv});
    }
    return out;
}

SwarmState step_between_impulses(const SwarmState& s, const SwarmParams& p, double dt) {
    SwarmParams free = p;
    free.pinning = Eigen::VectorXd::Zero(p.followers());
    return step_formation(free, s, dt);
}

double beta_from_strengths(const Eigen::VectorXd& ell) { return 1.0 - ell.minCoeff(); }

Theorem2Report theorem2_check(const SwarmParams& swarm, const ImpulsiveParams& imp, const DynamicsBounds& bounds,
                              const std::vector<double>& impulse_times, const std::vector<Eigen::VectorXd>& strengths) {
    Theorem2Report r;
    const Eigen::Index n = swarm.followers();
    const double c = swarm.schedule.front().gain;
    const Eigen::MatrixXd l = laplacian(swarm.adjacency);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    g.topRightCorner(n, n).setIdentity();
    g.bottomLeftCorner(n, n) = c * l;
    g.bottomRightCorner(n, n) = c * l;
    // The Kronecker factor I_m leaves the spectrum unchanged.
    r.lambda_max_g = jacobi_eigenvalues(g + g.transpose()).maxCoeff();
    r.eta = std::max(r.lambda_max_g, 1.0) + 2.0 * std::max(bounds.f_followers, bounds.f_leader) +
            2.0 * bounds.g_target;
    r.rho = imp.rho;
    r.rho_sup = std::numeric_limits<double>::infinity();
    r.satisfied = !impulse_times.empty();
    double prev = 0.0;
    for (std::size_t k = 0; k < impulse_times.size(); ++k) {
        const double dtk = impulse_times[k] - prev;
        prev = impulse_times[k];
        const double bk = beta_from_strengths(strengths[k]);
        r.beta_k.push_back(bk);
        r.beta = std::max(r.beta, bk);
        const double cond = r.eta * dtk + std::log(imp.rho * bk);
        r.condition_values.push_back(cond);
        if (!(cond < 0.0)) r.satisfied = false;
        r.rho_sup = std::min(r.rho_sup, std::exp(-r.eta * dtk) / bk);
    }
    const double acc = bounds.f_leader + bounds.g_target;
    const double tau = imp.interval;
    r.r_q = imp.r0 + std::max(acc * tau, imp.r0 * tau + 0.5 * acc * tau * tau) + imp.epsilon;
    return r;
}

TrackingRun simulate_tracking(const SwarmParams& swarm, const ImpulsiveParams& imp, const TargetModel& target,
                              const SwarmState& init, double t_end, double dt, const DynamicsBounds& bounds,
                              int stride) {
    validate(imp);
    if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
    const double ratio = imp.interval / dt;
    const long per_impulse = std::lround(ratio);
    if (per_impulse < 1 || std::abs(ratio - per_impulse) > 1e-9 * ratio)
        throw ConfigError("dt", "must divide the impulse interval");
    if (stride < 1) throw ConfigError("stride", "must be at least 1");
    const long steps = std::lround((t_end - init.t) / dt);

    TrackingRun run;
    SwarmState s = init;
    TargetState g = target.initial();
    double tg = init.t;
    if (init.t != 0.0) g = target.advance(g, 0.0, init.t);

    auto record = [&](bool impulse) {
        TrackingSample smp;
        smp.t = s.t;
        smp.impulse = impulse;
        smp.state = s;
        smp.target = g;
        agent_gaps(s, g, swarm.offsets, smp.pos_err, smp.vel_err);
        run.samples.push_back(std::move(smp));
    };
    record(false);
    for (long k = 1; k <= steps; ++k) {
        try {
            s = step_between_impulses(s, swarm, dt);
        } catch (const NumericError& ex) {
            run.diverged = true;
            run.diagnostic = ex.what();
            break;
        }
        s.t = init.t + k * dt;
        g = target.advance(g, tg, dt);
        tg = s.t;
        bool jumped = false;
        if (k % per_impulse == 0) {
            const Eigen::VectorXd ell = control_strength(s, g, swarm.offsets, imp);
            const std::size_t before = run.impulses.size();
            s = apply_impulse(s, g, swarm.offsets, ell, &run.impulses);
            for (std::size_t j = before; j < run.impulses.size(); ++j) {
                const auto& rec = run.impulses[j];
                const double tol = 1e-12;
                if ((rec.dx.cwiseAbs() - imp.dx_max).maxCoeff() > tol * (1.0 + imp.dx_max.maxCoeff()) ||
                    (rec.dv.cwiseAbs() - imp.dv_max).maxCoeff() > tol * (1.0 + imp.dv_max.maxCoeff()))
                    run.bounds_respected = false;
            }
            run.impulse_times.push_back(s.t);
            run.strengths.push_back(ell);
            jumped = true;
        }
        if (k % stride == 0 || k == steps || jumped) record(jumped);
    }
    run.report = theorem2_check(swarm, imp, bounds, run.impulse_times, run.strengths);
    return run;
}

}  // namespace uavcomp
