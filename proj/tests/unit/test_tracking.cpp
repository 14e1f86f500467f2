#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "uavcomp/error.hpp"
#include "uavcomp/tracking.hpp"

using namespace uavcomp;

namespace {

SwarmParams tracking_swarm() {
    SwarmParams p;
    p.adjacency.resize(3, 3);
    p.adjacency << 0.0, 0.5, 1.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0;
    p.pinning = Eigen::Vector3d(1.0, 0.0, 1.0);
    p.schedule = {{0.0, 0.002}};
    p.offsets.resize(3, 3);
    p.offsets << 20, 0, 0, 0, 20, 0, -20, -20, 0;
    return p;
}

SwarmState at_rest(const SwarmParams& p, const Eigen::Vector3d& base) {
    SwarmState s;
    s.leader_pos = base;
    s.follower_pos = p.offsets.rowwise() + base.transpose();
    s.follower_vel = Eigen::MatrixX3d::Zero(p.followers(), 3);
    return s;
}

}  // namespace

TEST_SUITE("tracking") {
    TEST_CASE("control ratio is the tightest axis") {
        const Eigen::Vector3d dx = Eigen::Vector3d::Constant(5.0), dv = Eigen::Vector3d::Constant(10.0);
        CHECK(control_ratio({10, 0, 0}, {0, 0, 0}, dx, dv) == 0.5);
        CHECK(control_ratio({1, 0, 0}, {0, -40, 0}, dx, dv) == 0.25);
        CHECK(control_ratio({0, 0, 0}, {0, 0, 0}, dx, dv) == std::numeric_limits<double>::infinity());
    }

    TEST_CASE("Q0 membership") {
        ImpulsiveParams p;
        p.membership_radius = 1.0;
        CHECK(inside_q0({0.5, 0, 0}, {0, 0.5, 0}, p));
        CHECK_FALSE(inside_q0({0.5, 0, 0}, {0, 2, 0}, p));
        p.membership = Q0Membership::position_only;
        CHECK(inside_q0({0.5, 0, 0}, {0, 2, 0}, p));
    }

    TEST_CASE("common strength: zero inside Q0, clamped outside") {
        const SwarmParams sw = tracking_swarm();
        ImpulsiveParams p;
        const TargetState g;
        SwarmState s = at_rest(sw, Eigen::Vector3d::Zero());
        CHECK(control_strength(s, g, sw.offsets, p).isZero());

        s.follower_pos(0, 0) += 1.0;  // ratio 5 -> clamped to max_strength
        Eigen::VectorXd ell = control_strength(s, g, sw.offsets, p);
        CHECK(ell(0) == 0.0);
        CHECK(ell(1) == 1.0);
        p.max_strength = 0.5;
        CHECK(control_strength(s, g, sw.offsets, p)(1) == 0.5);

        s.leader_vel = Eigen::Vector3d(0, 0, 40.0);  // ratio 0.25 sets the common value
        ell = control_strength(s, g, sw.offsets, p);
        CHECK(ell(0) == 0.25);
        CHECK(ell(1) == 0.25);
        CHECK(ell(2) == 0.0);
    }

    TEST_CASE("impulse jumps scale the gap") {
        const SwarmParams sw = tracking_swarm();
        TargetState g;
        g.pos = Eigen::Vector3d(100, 50, 150);
        g.vel = Eigen::Vector3d(3, 4, 0);
        SwarmState s = at_rest(sw, Eigen::Vector3d(90, 70, 140));
        const SwarmState same = apply_impulse(s, g, sw.offsets, Eigen::VectorXd::Zero(4));
        CHECK(same.follower_pos == s.follower_pos);

        std::vector<ImpulseRecord> log;
        const SwarmState full = apply_impulse(s, g, sw.offsets, Eigen::VectorXd::Ones(4), &log);
        CHECK((full.leader_pos - g.pos).norm() < 1e-12);
        CHECK((full.leader_vel - g.vel).norm() < 1e-12);
        for (Eigen::Index i = 0; i < 3; ++i)
            CHECK((full.follower_pos.row(i) - sw.offsets.row(i) - g.pos.transpose()).norm() < 1e-12);
        CHECK(log.size() == 4);
        CHECK(log[0].dx.isApprox(Eigen::Vector3d(10, -20, 10)));

        const SwarmState half = apply_impulse(s, g, sw.offsets, Eigen::VectorXd::Constant(4, 0.5));
        CHECK((half.leader_pos - g.pos).isApprox(0.5 * (s.leader_pos - g.pos)));
        CHECK_THROWS_AS(apply_impulse(s, g, sw.offsets, Eigen::VectorXd::Zero(3)), DomainError);
    }

    TEST_CASE("beta is one minus the weakest strength") {
        CHECK(beta_from_strengths(Eigen::Vector4d(0.5, 0.5, 0.5, 0.5)) == 0.5);
        CHECK(beta_from_strengths(Eigen::Vector4d(0.5, 0.2, 0.5, 0.5)) == 0.8);
        // Spectral form: lambda_max(I - diag(ell)).
        const Eigen::Vector4d ell(0.3, 0.6, 0.45, 0.9);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(Eigen::Matrix4d::Identity() - Eigen::Matrix4d(ell.asDiagonal()));
        CHECK(beta_from_strengths(ell) == doctest::Approx(es.eigenvalues().maxCoeff()));
    }

    TEST_CASE("certificate quantities") {
        const SwarmParams sw = tracking_swarm();
        ImpulsiveParams imp;
        const DynamicsBounds bounds{1.0, 1.0, 10.0};
        const std::vector<double> times{0.02, 0.04, 0.06};
        const std::vector<Eigen::VectorXd> strengths(3, Eigen::VectorXd::Constant(4, 0.5));
        const Theorem2Report r = theorem2_check(sw, imp, bounds, times, strengths);

        const Eigen::MatrixXd l = laplacian(sw.adjacency);
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
        g.topRightCorner(3, 3).setIdentity();
        g.bottomRows(3) << 0.002 * l, 0.002 * l;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g + g.transpose());
        CHECK(r.lambda_max_g == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-12));
        CHECK(r.eta == doctest::Approx(std::max(r.lambda_max_g, 1.0) + 2.0 + 20.0).epsilon(1e-14));
        CHECK(std::abs(r.eta - 23.0) < 0.5);
        CHECK(r.beta == 0.5);
        REQUIRE(r.condition_values.size() == 3);
        CHECK(r.condition_values[0] == doctest::Approx(r.eta * 0.02 + std::log(1.3 * 0.5)));
        CHECK(r.rho_sup == doctest::Approx(std::exp(-r.eta * 0.02) / 0.5));
        // The rho in the default configuration lies above what the certificate admits.
        CHECK(r.rho > r.rho_sup);
        CHECK_FALSE(r.satisfied);
        // R_Q = R0 + max{(f0+g) tau, R0 tau + (f0+g) tau^2 / 2} + eps
        CHECK(r.r_q == doctest::Approx(10.0 + std::max(11.0 * 0.02, 0.2 + 0.5 * 11.0 * 0.0004) + 1e-9));

        const Theorem2Report zero = theorem2_check(sw, imp, DynamicsBounds{}, times,
                                                   std::vector<Eigen::VectorXd>(3, Eigen::VectorXd::Zero(4)));
        CHECK(zero.beta == 1.0);
        for (double c : zero.condition_values) CHECK(c > 0.0);
        CHECK(zero.r_q == doctest::Approx(10.0 + 10.0 * 0.02 + 1e-9));
    }

    TEST_CASE("polyline target moves at constant speed with incoming corner tangents") {
        const TargetModel z = case_study_zigzag(10.0, 150.0);
        const double s = 10.0 / std::numbers::sqrt2;
        CHECK(z.initial().pos.isApprox(Eigen::Vector3d(0, 0, 150)));
        CHECK(z.path_state(10.0).vel.isApprox(Eigen::Vector3d(s, s, 0)));
        CHECK(z.path_state(20.0).vel.isApprox(Eigen::Vector3d(s, s, 0)));
        CHECK(z.path_state(22.0).vel.isApprox(Eigen::Vector3d(s, -s, 0)));
        CHECK(z.path_state(25.0).vel.isApprox(Eigen::Vector3d(s, -s, 0)));
        CHECK(z.path_state(26.0).vel.isApprox(Eigen::Vector3d(s, s, 0)));
        CHECK(z.path_state(25.0).pos.isApprox(Eigen::Vector3d(25 * s, 15 * s, 150)));
        CHECK(z.path_state(1e4).vel.isZero());
        CHECK_THROWS_AS(TargetModel::waypoint_path({Eigen::Vector3d::Zero()}, 1.0), ConfigError);
    }

    TEST_CASE("ODE target integrates ballistic motion exactly") {
        TargetState init;
        init.vel = Eigen::Vector3d(1, 2, 3);
        const Eigen::Vector3d a(0.5, -1, 0.25);
        const TargetModel m = TargetModel::dynamics(init, [a](double, const Eigen::Vector3d&, const Eigen::Vector3d&) {
            return a;
        });
        TargetState st = m.initial();
        for (int k = 0; k < 100; ++k) st = m.advance(st, 0.1 * k, 0.1);
        CHECK(st.pos.isApprox(init.vel * 10.0 + 0.5 * a * 100.0, 1e-12));
        CHECK(st.vel.isApprox(init.vel + a * 10.0, 1e-12));
    }

    TEST_CASE("formed swarm on a static target stays put without impulses") {
        const SwarmParams sw = tracking_swarm();
        TargetState init;
        init.pos = Eigen::Vector3d(0, 0, 150);
        const TargetModel m = TargetModel::dynamics(init, zero_dynamics());
        const TrackingRun run =
            simulate_tracking(sw, ImpulsiveParams{}, m, at_rest(sw, init.pos), 1.0, 0.01, DynamicsBounds{});
        CHECK(run.impulses.empty());
        CHECK(run.impulse_times.size() == 50);
        CHECK(run.samples.back().pos_err.isZero());
        CHECK(run.samples.back().vel_err.isZero());
    }

    TEST_CASE("time step must divide the impulse interval") {
        const SwarmParams sw = tracking_swarm();
        const TargetModel m = case_study_zigzag();
        CHECK_THROWS_AS(simulate_tracking(sw, ImpulsiveParams{}, m, at_rest(sw, m.initial().pos), 1.0, 0.03,
                                          DynamicsBounds{}),
                        ConfigError);
        ImpulsiveParams bad;
        bad.rho = 1.0;
        CHECK_THROWS_AS(validate(bad), ConfigError);
    }

    TEST_CASE("straight-line tracking converges with bounded jumps") {
        const SwarmParams sw = tracking_swarm();
        ImpulsiveParams imp;
        imp.max_strength = 0.5;
        imp.rho = 1.2;
        const TargetModel m =
            TargetModel::waypoint_path({Eigen::Vector3d(0, 0, 150), Eigen::Vector3d(1000, 0, 150)}, 10.0);
        SwarmState init = at_rest(sw, m.initial().pos + Eigen::Vector3d(8, -5, 3));
        init.follower_pos(1, 2) += 7.0;
        const TrackingRun run = simulate_tracking(sw, imp, m, init, 10.0, 0.01, DynamicsBounds{1, 1, 10}, 10);
        CHECK_FALSE(run.diverged);
        CHECK(run.bounds_respected);
        for (const auto& rec : run.impulses) {
            CHECK((rec.dx.cwiseAbs() - imp.dx_max).maxCoeff() <= 1e-9);
            CHECK((rec.dv.cwiseAbs() - imp.dv_max).maxCoeff() <= 1e-9);
        }
        const auto& last = run.samples.back();
        CHECK(last.pos_err.norm() < 1e-6);
        CHECK(last.vel_err.norm() < 1e-6);
        CHECK(run.report.rho_sup > 1.2);
        CHECK(run.report.satisfied);
    }

    TEST_CASE("leader coasts between impulses") {
        const SwarmParams sw = tracking_swarm();
        const TargetModel m = case_study_zigzag();
        SwarmState init = at_rest(sw, m.initial().pos + Eigen::Vector3d(3, 0, 0));
        const TrackingRun run = simulate_tracking(sw, ImpulsiveParams{}, m, init, 0.1, 0.005, DynamicsBounds{});
        for (std::size_t k = 1; k < run.samples.size(); ++k) {
            const auto& a = run.samples[k - 1];
            const auto& b = run.samples[k];
            if (!b.impulse) CHECK(b.state.leader_vel == a.state.leader_vel);
        }
    }
}
