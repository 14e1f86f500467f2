#include "uavcomp/formation.hpp"

#include <algorithm>
#include <cmath>

#include "uavcomp/error.hpp"
#include "uavcomp/rng.hpp"

namespace uavcomp {

AgentDynamics case_study_dynamics() {
    return [](double, const Eigen::Vector3d& x, const Eigen::Vector3d&) {
        return Eigen::Vector3d(1e-4, 1e-4 / (x.y() * x.y() + 1.0), 1e-4 * (x.z() - 150.0));
    };
}

AgentDynamics zero_dynamics() {
    return [](double, const Eigen::Vector3d&, const Eigen::Vector3d&) { return Eigen::Vector3d::Zero().eval(); };
}

Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& s, double tol, int max_sweeps) {
    if (s.rows() != s.cols()) throw DomainError("jacobi_eigenvalues: matrix must be square");
    Eigen::MatrixXd a = s;
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off <= tol * tol * a.squaredNorm()) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    Eigen::VectorXd ev = a.diagonal();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev;
}

double SwarmParams::gain_at(double t) const {
    double c = schedule.front().gain;
    for (const auto& seg : schedule)
        if (t >= seg.t_start) c = seg.gain;
    return c;
}

void validate(const SwarmParams& p) {
    const Eigen::Index n = p.adjacency.rows();
    if (n < 1 || p.adjacency.cols() != n) throw ConfigError("adjacency", "must be a non-empty square matrix");
    if ((p.adjacency.array() < 0.0).any() || !p.adjacency.allFinite())
        throw ConfigError("adjacency", "entries must be finite and non-negative");
    if ((p.adjacency.diagonal().array() != 0.0).any()) throw ConfigError("adjacency", "diagonal must be zero");
    if (p.pinning.size() != n) throw ConfigError("pinning", "needs one gain per follower");
    if ((p.pinning.array() < 0.0).any()) throw ConfigError("pinning", "gains must be non-negative");
    if (!(p.pinning.array() > 0.0).any()) throw ConfigError("pinning", "at least one follower must be pinned");
    if (p.offsets.rows() != n) throw ConfigError("offsets", "needs one offset per follower");
    if (p.schedule.empty()) throw ConfigError("schedule", "needs at least one segment");
    for (std::size_t i = 0; i < p.schedule.size(); ++i) {
        if (!(p.schedule[i].gain > 0.0)) throw ConfigError("schedule", "gains must be positive");
        if (i > 0 && !(p.schedule[i].t_start > p.schedule[i - 1].t_start))
            throw ConfigError("schedule", "start times must be strictly increasing");
    }
    if (p.speed_cap < 0.0) throw ConfigError("speed_cap", "must be non-negative");
    if (!p.dynamics) throw ConfigError("dynamics", "missing");
}

bool Theorem1Report::all_satisfied() const {
    for (bool b : satisfied_for)
        if (!b) return false;
    return !satisfied_for.empty();
}

Theorem1Report theorem1_check(const Eigen::MatrixXd& l, const Eigen::VectorXd& pinning, double rho1, double rho2,
                              const std::vector<GainSegment>& schedule) {
    const Eigen::Index n = l.rows();
    if (l.cols() != n || pinning.size() != n) throw GraphConfigurationError("theorem1_check: dimension mismatch");
    Eigen::MatrixXd m = l;
    m.diagonal() += pinning;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw GraphConfigurationError("L + B is singular");
    Theorem1Report r;
    r.q = lu.solve(Eigen::VectorXd::Ones(n));
    if ((r.q.array() <= 0.0).any()) throw AssumptionViolation("(L + B)^{-1} 1 has a non-positive entry");
    r.p_diag = r.q.cwiseInverse();
    r.lambda_max_p = r.p_diag.maxCoeff();
    r.Q = r.p_diag.asDiagonal() * m + m.transpose() * r.p_diag.asDiagonal();
    r.lambda_min_q = jacobi_eigenvalues(r.Q).minCoeff();
    if (!(r.lambda_min_q > 0.0)) throw AssumptionViolation("Q is not positive definite");
    r.rho1 = rho1;
    r.rho2 = rho2;
    r.d = std::max(3.0 * rho1 + rho2, rho1 + 3.0 * rho2 + 2.0);
    r.c_min = r.d * r.lambda_max_p / r.lambda_min_q;
    for (const auto& seg : schedule) r.satisfied_for.push_back(seg.gain > r.c_min);
    return r;
}

LipschitzEstimate estimate_lipschitz(const AgentDynamics& f, const FlightEnvelope& env, int samples,
                                     std::uint64_t seed) {
    Engine rng = make_engine(seed, stream::lipschitz);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LipschitzEstimate est;
    const double hx = 1e-3, hv = 1e-4;
    for (int s = 0; s < samples; ++s) {
        Eigen::Vector3d x, v;
        for (int k = 0; k < 3; ++k) x(k) = env.pos_lo(k) + (env.pos_hi(k) - env.pos_lo(k)) * u(rng);
        for (int k = 0; k < 3; ++k) v(k) = env.max_speed * (2.0 * u(rng) - 1.0);
        if (v.norm() > env.max_speed) v *= env.max_speed / v.norm();
        Eigen::Matrix3d jx, jv;
        for (int k = 0; k < 3; ++k) {
            const Eigen::Vector3d ex = Eigen::Vector3d::Unit(k) * hx;
            const Eigen::Vector3d ev = Eigen::Vector3d::Unit(k) * hv;
            jx.col(k) = (f(0.0, x + ex, v) - f(0.0, x - ex, v)) / (2.0 * hx);
            jv.col(k) = (f(0.0, x, v + ev) - f(0.0, x, v - ev)) / (2.0 * hv);
        }
        est.rho1 = std::max(est.rho1, std::sqrt(std::max(0.0, jacobi_eigenvalues(jx.transpose() * jx).maxCoeff())));
        est.rho2 = std::max(est.rho2, std::sqrt(std::max(0.0, jacobi_eigenvalues(jv.transpose() * jv).maxCoeff())));
    }
    return est;
}

namespace {

struct Derivative {
    Eigen::Vector3d dx0, dv0;
    Eigen::MatrixX3d dx, dv;
};

Derivative rhs(const SwarmParams& p, const Eigen::MatrixXd& l, double c, double t, const Eigen::Vector3d& x0,
               const Eigen::Vector3d& v0, const Eigen::MatrixX3d& x, const Eigen::MatrixX3d& v) {
    Derivative d;
    d.dx0 = v0;
    d.dv0 = p.dynamics(t, x0, v0);
    d.dx = v;
    const Eigen::MatrixX3d e = x - p.offsets;
    // Neighbour coupling sum_j a_ij [(e_j - e_i) + (v_j - v_i)] is -L (e + v).
    d.dv = -c * (l * (e + v));
    const Eigen::MatrixX3d track = (e.rowwise() - x0.transpose()) + (v.rowwise() - v0.transpose());
    d.dv -= c * (p.pinning.asDiagonal() * track);
    for (Eigen::Index i = 0; i < x.rows(); ++i) d.dv.row(i) += p.dynamics(t, x.row(i), v.row(i)).transpose();
    return d;
}

void saturate(Eigen::Ref<Eigen::Vector3d> v, double cap) {
    const double s = v.norm();
    if (s > cap) v *= cap / s;
}

}  // namespace

SwarmState step_formation(const SwarmParams& p, const SwarmState& s, double dt) {
    if (!(dt > 0.0)) throw DomainError("step_formation: dt must be positive");
    const Eigen::MatrixXd l = laplacian(p.adjacency);
    const double c = p.gain_at(s.t);
    const double h2 = 0.5 * dt;
    const Derivative k1 = rhs(p, l, c, s.t, s.leader_pos, s.leader_vel, s.follower_pos, s.follower_vel);
    const Derivative k2 = rhs(p, l, c, s.t + h2, s.leader_pos + h2 * k1.dx0, s.leader_vel + h2 * k1.dv0,
                              s.follower_pos + h2 * k1.dx, s.follower_vel + h2 * k1.dv);
    const Derivative k3 = rhs(p, l, c, s.t + h2, s.leader_pos + h2 * k2.dx0, s.leader_vel + h2 * k2.dv0,
                              s.follower_pos + h2 * k2.dx, s.follower_vel + h2 * k2.dv);
    const Derivative k4 = rhs(p, l, c, s.t + dt, s.leader_pos + dt * k3.dx0, s.leader_vel + dt * k3.dv0,
                              s.follower_pos + dt * k3.dx, s.follower_vel + dt * k3.dv);
    const double w = dt / 6.0;
    SwarmState out;
    out.t = s.t + dt;
    out.leader_pos = s.leader_pos + w * (k1.dx0 + 2.0 * k2.dx0 + 2.0 * k3.dx0 + k4.dx0);
    out.leader_vel = s.leader_vel + w * (k1.dv0 + 2.0 * k2.dv0 + 2.0 * k3.dv0 + k4.dv0);
    out.follower_pos = s.follower_pos + w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.follower_vel = s.follower_vel + w * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    if (p.speed_cap > 0.0) {
        saturate(out.leader_vel, p.speed_cap);
        for (Eigen::Index i = 0; i < out.follower_vel.rows(); ++i) {
            Eigen::Vector3d v = out.follower_vel.row(i);
            saturate(v, p.speed_cap);
            out.follower_vel.row(i) = v;
        }
    }
    if (!out.leader_pos.allFinite() || !out.leader_vel.allFinite() || !out.follower_pos.allFinite() ||
        !out.follower_vel.allFinite())
        throw NumericError("step_formation: state diverged at t = " + std::to_string(out.t));
    return out;
}

FormationErrors formation_errors(const SwarmParams& p, const SwarmState& s) {
    FormationErrors e;
    e.t = s.t;
    e.pos = (s.follower_pos - p.offsets).rowwise() - s.leader_pos.transpose();
    e.vel = s.follower_vel.rowwise() - s.leader_vel.transpose();
    return e;
}

FormationRun simulate_formation(const SwarmParams& p, const SwarmState& init, double t_end, double dt, int stride,
                                const NoiseSpec& noise) {
    validate(p);
    if (!(dt > 0.0) || !(t_end >= init.t)) throw ConfigError("dt", "need dt > 0 and t_end >= t0");
    if (stride < 1) throw ConfigError("stride", "must be at least 1");
    if (init.follower_pos.rows() != p.followers() || init.follower_vel.rows() != p.followers())
        throw ConfigError("initial_state", "follower count does not match the graph");
    const long steps = std::lround((t_end - init.t) / dt);
    Engine rng = make_engine(noise.seed, stream::noise);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Eigen::Index n = p.followers();

    FormationRun run;
    SwarmState s = init;
    run.samples.push_back(s);
    run.errors.push_back(formation_errors(p, s));
    for (long k = 1; k <= steps; ++k) {
        try {
            SwarmState next = step_formation(p, s, dt);
            next.t = init.t + k * dt;
            if (noise.intensity > 0.0) {
                // Euler-Maruyama for the perturbation E in c(L+B) - E acting on xi_x + xi_v.
                const FormationErrors e = formation_errors(p, s);
                const Eigen::MatrixX3d drive = e.pos + e.vel;
                Eigen::MatrixXd dw(n, n);
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j) dw(i, j) = gauss(rng) * std::sqrt(dt);
                next.follower_vel += noise.intensity * (dw * drive);
            }
            s = std::move(next);
        } catch (const NumericError& ex) {
            run.diverged = true;
            run.diagnostic = ex.what();
            break;
        }
        if (k % stride == 0 || k == steps) {
            run.samples.push_back(s);
            run.errors.push_back(formation_errors(p, s));
        }
    }
    return run;
}

}  // namespace uavcomp
