#include "uavcomp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "uavcomp/analytic.hpp"
#include "uavcomp/error.hpp"
#include "uavcomp/formation.hpp"
#include "uavcomp/geometry.hpp"
#include "uavcomp/montecarlo.hpp"
#include "uavcomp/scenario.hpp"
#include "uavcomp/specialfn.hpp"
#include "uavcomp/tracking.hpp"

namespace uavcomp {

namespace {

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

// Accumulates named checks; the criterion passes only if every check does.
struct Checks {
    CriterionResult& r;
    void add(bool ok, const std::string& what) {
        r.details.push_back(std::string(ok ? "" : "FAIL ") + what);
        r.pass = r.pass && ok;
    }
};

ScenarioConfig base_config(const VerifyOptions& o) {
    ScenarioConfig cfg = parse_config(Json{{"scenario", "verify"}});
    cfg.master_seed = o.seed;
    cfg.threads = o.threads;
    cfg.mc.trials = o.trials;
    return cfg;
}

McConfig base_mc(const VerifyOptions& o, double alpha = 2.8, double density = 16e-6) {
    ScenarioConfig cfg = base_config(o);
    McConfig mc = mc_config(cfg);
    mc.network.alpha = alpha;
    mc.network.density = density;
    return mc;
}

const std::vector<double> grid_db{-10, -5, 0, 5, 10, 15, 20};

std::vector<double> grid_linear() {
    std::vector<double> g;
    for (double db : grid_db) g.push_back(db_to_linear(db));
    return g;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void gamma_fidelity(const VerifyOptions& o, Checks& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const McConfig mc = base_mc(o);
    const BatchResult b = run_batch(mc, {Scheme::proposed()}, {mc.network.alpha});
    const GammaApprox sig = lemma1_params(mc.network), intf = lemma2_params(mc.network);
    const auto& s = b.at(0, 0);
    const double ds = sup_cdf_distance(extract(s, &SirSample::signal), [&](double x) { return signal_cdf(sig, x); });
    const double di =
        sup_cdf_distance(extract(s, &SirSample::interference), [&](double x) { return interference_cdf(intf, x); });
    const double dz = sup_cdf_distance(
        extract(s, &SirSample::sir), [&](double x) { return 1.0 - coverage_probability(sig, intf, x).value; }, 2000);
    c.add(ds <= 0.03, "signal sup|F_n - F| = " + fmt(ds) + " (<= 0.03)");
    c.add(di <= 0.03, "interference sup|F_n - F| = " + fmt(di) + " (<= 0.03)");
    c.add(dz <= 0.03, "SIR sup|F_n - F| = " + fmt(dz) + " (<= 0.03)");
    const double t = seconds_since(t0);
    c.add(t <= 120.0, "runtime " + fmt(t, 3) + " s (<= 120 s) at " + std::to_string(mc.trials) + " trials");
}

void coverage_agreement(const VerifyOptions& o, Checks& c) {
    McConfig mc = base_mc(o);
    mc.gamma_grid = grid_linear();
    const std::vector<double> alphas{2.4, 2.8};
    const BatchResult b = run_batch(mc, {Scheme::proposed()}, alphas);
    std::vector<std::vector<double>> sim(2), ana(2);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        NetworkParams np = mc.network;
        np.alpha = alphas[a];
        const auto est = coverage_from_samples(b.at(0, a), mc.gamma_grid);
        double worst = 0.0, at_db = 0.0;
        for (std::size_t k = 0; k < grid_db.size(); ++k) {
            sim[a].push_back(est[k].value);
            ana[a].push_back(coverage_probability(mc.gamma_grid[k], np).value);
            const double d = std::abs(sim[a][k] - ana[a][k]);
            if (d > worst) worst = d, at_db = grid_db[k];
        }
        c.add(worst <= 0.05, "alpha " + fmt(alphas[a], 2) + ": max |analytic - MC| = " + fmt(worst) + " at " +
                                 fmt(at_db, 3) + " dB (<= 0.05)");
    }
    bool dom_sim = true, dom_ana = true;
    for (std::size_t k = 0; k < grid_db.size(); ++k) {
        dom_sim = dom_sim && sim[1][k] >= sim[0][k];
        dom_ana = dom_ana && ana[1][k] >= ana[0][k] - 1e-12;
    }
    c.add(dom_sim, "MC coverage at alpha 2.8 >= alpha 2.4 at every threshold");
    c.add(dom_ana, "analytic coverage at alpha 2.8 >= alpha 2.4 at every threshold");
}

void rate_trends(const VerifyOptions& o, Checks& c) {
    const std::vector<double> alphas{2.4, 2.6, 2.8, 3.0, 3.2};
    const std::vector<double> densities{8e-6, 16e-6, 32e-6};
    double worst_rel = 0.0;
    int pcf_points = 0;
    auto pcf_check = [&](const NetworkParams& np, double direct) {
        try {
            const double pcf = ergodic_rate(np, RateForm::parabolic_cylinder).value;
            worst_rel = std::max(worst_rel, std::abs(pcf - direct) / std::abs(direct));
            ++pcf_points;
        } catch (const ConditionError&) {
        }
    };

    McConfig mc = base_mc(o);
    const BatchResult b = run_batch(mc, {Scheme::proposed()}, alphas);
    std::vector<double> sim, ana;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        NetworkParams np = mc.network;
        np.alpha = alphas[a];
        sim.push_back(rate_from_samples(b.at(0, a)).value);
        ana.push_back(ergodic_rate(np, RateForm::direct).value);
        pcf_check(np, ana.back());
    }
    std::vector<double> sim_l, ana_l;
    for (double lam : densities) {
        McConfig m = base_mc(o, 2.8, lam);
        const BatchResult bl =
            lam == 16e-6 ? BatchResult{} : run_batch(m, {Scheme::proposed()}, {2.8});
        sim_l.push_back(lam == 16e-6 ? sim[2] : rate_from_samples(bl.at(0, 0)).value);
        ana_l.push_back(ergodic_rate(m.network, RateForm::direct).value);
        pcf_check(m.network, ana_l.back());
    }
    auto increasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::greater_equal<double>()) == v.end();
    };
    auto decreasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::less_equal<double>()) == v.end();
    };
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
        return s;
    };
    c.add(increasing(ana), "analytic rate strictly increasing in alpha: " + list(ana));
    c.add(increasing(sim), "MC rate strictly increasing in alpha: " + list(sim));
    c.add(decreasing(ana_l), "analytic rate strictly decreasing in density 8/16/32: " + list(ana_l));
    c.add(decreasing(sim_l), "MC rate strictly decreasing in density 8/16/32: " + list(sim_l));
    c.add(pcf_points > 0 && worst_rel <= 1e-6, "direct vs parabolic-cylinder rate: max rel diff " + fmt(worst_rel, 3) +
                                                  " over " + std::to_string(pcf_points) + " points (<= 1e-6)");
}

void scheme_comparison(const VerifyOptions& o, Checks& c) {
    McConfig mc = base_mc(o);
    mc.gamma_grid = grid_linear();
    const std::vector<Scheme> schemes{Scheme::proposed(),       Scheme::no_comp(),        Scheme::conventional(1),
                                      Scheme::conventional(2), Scheme::conventional(3), Scheme::conventional(4)};
    const BatchResult b = run_batch(mc, schemes, {mc.network.alpha});
    std::vector<std::vector<double>> cov;
    for (std::size_t s = 0; s < schemes.size(); ++s) {
        cov.emplace_back();
        for (const auto& e : coverage_from_samples(b.at(s, 0), mc.gamma_grid)) cov.back().push_back(e.value);
    }
    bool dominates = true, monotone = true;
    double gap = 0.0, gap_db = 0.0;
    for (std::size_t k = 0; k < grid_db.size(); ++k) {
        dominates = dominates && cov[0][k] >= cov[1][k];
        for (std::size_t n = 3; n < schemes.size(); ++n) monotone = monotone && cov[n][k] >= cov[n - 1][k];
        const double d = std::abs(cov[0][k] - cov[5][k]);
        if (d > gap) gap = d, gap_db = grid_db[k];
    }
    c.add(dominates, "proposed >= no_comp at every threshold");
    c.add(monotone, "conventional_n non-decreasing in n at every threshold");
    c.add(gap <= 0.05,
          "max |proposed - conventional_4| = " + fmt(gap) + " at " + fmt(gap_db, 3) + " dB (<= 0.05)");
}

void formation_convergence(const VerifyOptions& o, Checks& c) {
    const ScenarioConfig cfg = base_config(o);
    const FormationSetup setup = case_study_formation(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const FormationRun run = simulate_formation(setup.swarm, setup.init, cfg.formation.t_end, cfg.formation.dt,
                                                cfg.formation.stride);
    const double t = seconds_since(t0);
    c.add(!run.diverged, "simulation finished at t = " + fmt(run.errors.back().t, 4) + " s");
    const auto& e0 = run.errors.front();
    const auto& e1 = run.errors.back();
    const double rv = e1.vel.norm() / e0.vel.norm(), rp = e1.pos.norm() / e0.pos.norm();
    c.add(rv <= 0.01, "terminal/initial velocity-error norm = " + fmt(rv) + " (<= 0.01)");
    c.add(rp <= 0.01, "terminal/initial position-error norm = " + fmt(rp) + " (<= 0.01)");
    c.add(t <= 10.0, "runtime " + fmt(t, 3) + " s (<= 10 s)");
}

// Plain Gaussian elimination with partial pivoting on a dense copy.
std::vector<double> eliminate(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

void theorem1_numerics(const VerifyOptions& o, Checks& c) {
    const ScenarioConfig cfg = base_config(o);
    const SwarmParams& sw = cfg.formation.swarm;
    const Eigen::MatrixXd l = laplacian(sw.adjacency);
    const LipschitzEstimate lip =
        estimate_lipschitz(sw.dynamics, FlightEnvelope{}, cfg.formation.lipschitz_samples, o.seed);
    const Theorem1Report rep = theorem1_check(l, sw.pinning, lip.rho1, lip.rho2, sw.schedule);

    std::vector<std::vector<double>> m(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = l(i, j) + (i == j ? sw.pinning(i) : 0.0);
    const std::vector<double> oracle = eliminate(m, {1.0, 1.0, 1.0});
    const double expect[3] = {5.0 / 3.0, 11.0 / 3.0, 4.0 / 3.0};
    double d_oracle = 0.0, d_exact = 0.0;
    for (int i = 0; i < 3; ++i) {
        d_oracle = std::max(d_oracle, std::abs(rep.q(i) - oracle[i]));
        d_exact = std::max(d_exact, std::abs(rep.q(i) - expect[i]));
    }
    c.add(d_oracle <= 1e-12, "q vs elimination oracle: max diff " + fmt(d_oracle, 3) + " (<= 1e-12)");
    c.add(d_exact <= 1e-12, "q = (" + fmt(rep.q(0), 12) + ", " + fmt(rep.q(1), 12) + ", " + fmt(rep.q(2), 12) +
                                ") vs (5/3, 11/3, 4/3)");
    c.add((rep.Q - rep.Q.transpose()).norm() == 0.0, "Q symmetric exactly");
    c.add(rep.lambda_min_q > 0.0, "lambda_min(Q) = " + fmt(rep.lambda_min_q, 6) + " > 0");
    std::string per;
    for (std::size_t k = 0; k < sw.schedule.size(); ++k)
        per += (k ? ", " : "") + fmt(sw.schedule[k].gain, 3) + (rep.satisfied_for[k] ? " ok" : " below");
    c.add(rep.all_satisfied(), "schedule vs c_min = " + fmt(rep.c_min) + " (rho1 = " + fmt(lip.rho1, 3) +
                                   ", rho2 = " + fmt(lip.rho2, 3) + ", lambda_max(P) = " + fmt(rep.lambda_max_p) +
                                   "): " + per);
}

struct TrackingOutcome {
    TrackingRun run;
    ImpulsiveParams impulse;
};

TrackingOutcome case_tracking(const VerifyOptions& o) {
    const ScenarioConfig cfg = base_config(o);
    const TrackingSetup setup = case_study_tracking(cfg);
    const auto& t = cfg.tracking;
    return {simulate_tracking(setup.swarm, setup.impulse, setup.target, setup.init, t.t_end, t.dt, t.bounds, 1),
            setup.impulse};
}

void tracking_case(const VerifyOptions& o, Checks& c) {
    const TrackingOutcome out = case_tracking(o);
    const TrackingRun& run = out.run;
    c.add(!run.diverged, "simulation finished (" + std::to_string(run.impulse_times.size()) + " impulses)");
    auto window_max = [&](double a, double b, bool vel) {
        double m = 0.0;
        for (const auto& s : run.samples)
            if (s.t >= a - 1e-9 && s.t < b - 1e-9) m = std::max(m, (vel ? s.vel_err : s.pos_err).norm());
        return m;
    };
    const double v0 = run.samples.front().vel_err.norm();
    const double v30 = window_max(29.0, 30.0, true);
    c.add(v30 <= 0.01 * v0, "velocity-error norm over [29, 30) s = " + fmt(v30, 3) + " (<= 1% of initial " +
                                fmt(v0, 3) + ")");
    for (double tc : {20.0, 25.0}) {
        for (bool vel : {false, true}) {
            const double pre = window_max(tc - 1.0, tc, vel);
            const double peak = window_max(tc, tc + 2.0, vel);
            const double post = window_max(tc + 2.0, tc + 3.0, vel);
            c.add(post <= 1.1 * pre, std::string(vel ? "velocity" : "position") + " error after turn at " +
                                         fmt(tc, 3) + " s: peak " + fmt(peak, 3) + ", " + fmt(tc + 2.0, 3) +
                                         "-" + fmt(tc + 3.0, 3) + " s max " + fmt(post, 3) + " vs 110% of " +
                                         fmt(pre, 3));
        }
    }
    double worst = 0.0;
    for (const auto& r : run.impulses) {
        worst = std::max(worst, (r.dx.cwiseAbs().array() / out.impulse.dx_max.array()).maxCoeff());
        worst = std::max(worst, (r.dv.cwiseAbs().array() / out.impulse.dv_max.array()).maxCoeff());
    }
    c.add(run.bounds_respected && worst <= 1.0 + 1e-12,
          "impulse jumps within per-axis bounds (max |jump|/bound = " + fmt(worst, 6) + ")");
}

void theorem2_numerics(const VerifyOptions& o, Checks& c) {
    const TrackingOutcome out = case_tracking(o);
    const Theorem2Report& r = out.run.report;
    c.add(std::abs(r.eta - 23.0) < 0.5, "eta = " + fmt(r.eta, 6) + " (lambda_max(G^T+G) = " +
                                            fmt(r.lambda_max_g, 6) + "), 23 at two significant digits");
    c.add(std::abs(r.beta - 0.5) <= 1e-12, "beta = max_k beta_k = " + fmt(r.beta, 12));
    c.add(r.condition_values.size() == out.run.impulse_times.size() && !r.condition_values.empty(),
          std::to_string(r.condition_values.size()) + " per-impulse condition values reported");
    bool all_neg = std::all_of(r.condition_values.begin(), r.condition_values.end(), [](double v) { return v < 0.0; });
    c.add(r.satisfied == all_neg, "satisfied flag consistent with the condition values");
    const double worst = *std::max_element(r.condition_values.begin(), r.condition_values.end());
    const bool surfaced = r.rho_sup < r.rho ? !r.satisfied && worst > 0.0 : r.satisfied;
    c.add(surfaced, "rho = " + fmt(r.rho, 3) + " vs largest admissible rho = " + fmt(r.rho_sup, 6) +
                        "; worst condition value " + fmt(worst, 4) + (r.satisfied ? " (satisfied)" : " (violated)"));
    c.add(r.r_q > 0.0, "R_Q = " + fmt(r.r_q, 6) + " m");
}

void property_suites(const VerifyOptions& o, Checks& c) {
    const auto t0 = std::chrono::steady_clock::now();
    {
        double worst = 0.0;
        for (double x = 0.1; x < 30.0; x += 0.37)
            worst = std::max(worst, std::abs(gamma_fn(x + 1.0) / (x * gamma_fn(x)) - 1.0));
        c.add(worst <= 1e-13, "Gamma(x+1) = x Gamma(x): max rel err " + fmt(worst, 3));
    }
    {
        double worst = 0.0;
        for (double p : {-6.5, -3.0, -1.2, 0.5, 2.0, 4.3})
            for (double z : {0.2, 1.0, 2.5, 6.0}) {
                const double a = parabolic_cylinder_d(p + 1.0, z), b = parabolic_cylinder_d(p, z),
                             d = parabolic_cylinder_d(p - 1.0, z);
                const double scale = std::abs(a) + std::abs(z * b) + std::abs(p * d);
                worst = std::max(worst, std::abs(a - z * b + p * d) / scale);
            }
        c.add(worst <= 1e-10, "D_{p+1} - z D_p + p D_{p-1} = 0: max rel residual " + fmt(worst, 3));
    }
    {
        double worst = 0.0;
        for (double z : {-20.0, -3.0, -0.5, 0.7, 4.0, 15.0}) {
            worst = std::max(worst, std::abs(kummer_1f1(2.5, 2.5, z) / std::exp(z) - 1.0));
            worst = std::max(worst, std::abs(kummer_1f1(0.0, 1.7, z) - 1.0));
            worst = std::max(worst, std::abs(kummer_1f1(1.0, 2.0, z) / (std::expm1(z) / z) - 1.0));
        }
        c.add(worst <= 1e-12, "1F1(a;a;z) = e^z, 1F1(0;b;z) = 1, 1F1(1;2;z) = (e^z-1)/z: max rel err " +
                                  fmt(worst, 3));
    }
    {
        bool ok = true;
        Engine rng = make_engine(o.seed, stream::trial, 0xde1a);
        std::uniform_real_distribution<double> u(-1000.0, 1000.0);
        for (int set = 0; set < 5 && ok; ++set) {
            Eigen::MatrixX2d pts(100, 2);
            for (int i = 0; i < 100; ++i) pts.row(i) << u(rng), u(rng);
            const Triangulation tri = delaunay(pts);
            for (const auto& t : tri.triangles)
                for (int k = 0; k < 100 && ok; ++k) {
                    if (k == t[0] || k == t[1] || k == t[2]) continue;
                    ok = incircle(pts.row(t[0]), pts.row(t[1]), pts.row(t[2]), pts.row(k)) <= 0;
                }
            // Euler: a triangulation of n points with h on the hull has 2n - 2 - h triangles.
            int hull = 0;
            for (int i = 0; i < 100; ++i) {
                bool extreme = false;
                for (int j = 0; j < 100 && !extreme; ++j) {
                    if (j == i) continue;
                    bool all_left = true;
                    for (int k = 0; k < 100 && all_left; ++k)
                        if (k != i && k != j) all_left = orientation(pts.row(i), pts.row(j), pts.row(k)) > 0;
                    extreme = all_left;
                }
                hull += extreme;
            }
            ok = ok && static_cast<int>(tri.triangles.size()) == 2 * 100 - 2 - hull;
        }
        c.add(ok, "Delaunay: empty circumcircles and 2n-2-h triangles on five 100-point sets");
    }
    {
        // Counts on a disk with mean 10, compared with the Poisson law in merged bins.
        DeploymentSpec spec;
        spec.min_count = 0;
        spec.margin = 1.0;
        spec.region_radius = 1000.0;
        spec.density = 10.0 / (M_PI * 1e6);
        const int draws = 4000;
        std::vector<double> hist(26, 0.0);
        for (int i = 0; i < draws; ++i) {
            const Deployment d = sample_deployment(spec, derive_seed(o.seed, 0xc41, i));
            hist[std::min<Eigen::Index>(d.size(), 25)] += 1.0;
        }
        std::vector<double> obs, expct;
        double acc_o = 0.0, acc_e = 0.0, cdf = 0.0;
        for (int k = 0; k <= 25; ++k) {
            const double pk = k < 25 ? std::exp(k * std::log(10.0) - 10.0 - log_gamma(k + 1.0)) : 1.0 - cdf;
            cdf += pk;
            acc_o += hist[k];
            acc_e += pk * draws;
            if (acc_e >= 20.0) {
                obs.push_back(acc_o);
                expct.push_back(acc_e);
                acc_o = acc_e = 0.0;
            }
        }
        if (acc_e > 0.0) obs.back() += acc_o, expct.back() += acc_e;
        double chi2 = 0.0;
        for (std::size_t k = 0; k < obs.size(); ++k) chi2 += (obs[k] - expct[k]) * (obs[k] - expct[k]) / expct[k];
        const double df = static_cast<double>(obs.size()) - 1.0;
        const double pval = gamma_q(0.5 * df, 0.5 * chi2);
        c.add(pval > 1e-3, "PPP counts chi-square = " + fmt(chi2) + " on " + fmt(df, 3) + " dof, p = " + fmt(pval, 3));
    }
    {
        ScenarioConfig cfg = base_config(o);
        FormationSetup s = case_study_formation(cfg);
        s.swarm.speed_cap = 0.0;
        auto run = [&](double dt) {
            SwarmState x = s.init;
            const int steps = static_cast<int>(std::lround(10.0 / dt));
            for (int k = 0; k < steps; ++k) {
                x = step_formation(s.swarm, x, dt);
                x.t = (k + 1) * dt;
            }
            return x;
        };
        auto dist = [](const SwarmState& a, const SwarmState& b) {
            return (a.follower_pos - b.follower_pos).norm() + (a.follower_vel - b.follower_vel).norm() +
                   (a.leader_pos - b.leader_pos).norm() + (a.leader_vel - b.leader_vel).norm();
        };
        s.swarm.schedule = {{0.0, 0.5}};
        const SwarmState a = run(0.4), b = run(0.2), d = run(0.1);
        const double ratio = dist(a, b) / dist(b, d);
        c.add(ratio > 12.0 && ratio < 20.0, "RK4 step halving error ratio = " + fmt(ratio) + " (about 16)");
    }
    {
        McConfig mc = base_mc(o);
        mc.trials = 3000;
        mc.threads = 1;
        const BatchResult one = run_batch(mc, {Scheme::proposed(), Scheme::no_comp()}, {2.8});
        mc.threads = 4;
        const BatchResult four = run_batch(mc, {Scheme::proposed(), Scheme::no_comp()}, {2.8});
        bool same = true;
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t t = 0; t < mc.trials; ++t) {
                const SirSample &x = one.at(s, 0)[t], &y = four.at(s, 0)[t];
                same = same && x.sir == y.sir && x.signal == y.signal && x.interference == y.interference;
            }
        const MetricEstimate r1 = rate_from_samples(one.at(0, 0)), r4 = rate_from_samples(four.at(0, 0));
        c.add(same && r1.value == r4.value && r1.std_err == r4.std_err,
              "bit-identical samples and estimates with 1 and 4 threads (seed " + std::to_string(o.seed) + ")");
    }
    const double t = seconds_since(t0);
    c.add(t <= 300.0, "runtime " + fmt(t, 3) + " s (<= 300 s)");
}

}  // namespace

std::string criterion_title(int id) {
    switch (id) {
        case 1: return "gamma-approximation fidelity";
        case 2: return "coverage agreement";
        case 3: return "rate trends";
        case 4: return "scheme comparison";
        case 5: return "formation convergence";
        case 6: return "pinning-gain feasibility numerics";
        case 7: return "impulsive tracking";
        case 8: return "impulsive-control feasibility numerics";
        case 9: return "property suites";
    }
    throw DomainError("criterion id out of range");
}

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
    CriterionResult r;
    r.id = id;
    r.title = criterion_title(id);
    r.pass = true;
    Checks c{r};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (id) {
            case 1: gamma_fidelity(opts, c); break;
            case 2: coverage_agreement(opts, c); break;
            case 3: rate_trends(opts, c); break;
            case 4: scheme_comparison(opts, c); break;
            case 5: formation_convergence(opts, c); break;
            case 6: theorem1_numerics(opts, c); break;
            case 7: tracking_case(opts, c); break;
            case 8: theorem2_numerics(opts, c); break;
            case 9: property_suites(opts, c); break;
        }
    } catch (const std::exception& e) {
        c.add(false, std::string("exception: ") + e.what());
    }
    r.seconds = seconds_since(t0);
    return r;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << " (" << std::fixed << std::setprecision(1)
       << r.seconds << " s)";
    for (std::size_t i = 0; i < r.details.size(); ++i) os << (i ? "; " : ": ") << r.details[i];
    return os.str();
}

}  // namespace uavcomp
