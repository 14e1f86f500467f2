#include "uavcomp/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "uavcomp/error.hpp"
#include "uavcomp/geometry.hpp"
#include "uavcomp/verify.hpp"

#ifndef UAVCOMP_VERSION
#define UAVCOMP_VERSION "dev"
#endif

namespace uavcomp {

namespace {

// Reads one JSON object, copies every value it hands out (defaults included)
// into `resolved`, and rejects keys nobody asked for.
class Section {
public:
    Section(const Json& node, Json& resolved, std::string path)
        : node_(node), resolved_(resolved), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_, "expected an object");
        if (!resolved_.is_object()) resolved_ = Json::object();
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <typename T>
    T get(const std::string& key, const T& fallback) {
        seen_.insert(key);
        T value = fallback;
        if (node_.contains(key)) {
            try {
                value = node_.at(key).get<T>();
            } catch (const Json::exception&) {
                throw ConfigError(key_path(key), "wrong type");
            }
        }
        resolved_[key] = value;
        return value;
    }

    Section section(const std::string& key) {
        seen_.insert(key);
        static const Json empty = Json::object();
        const Json& child = node_.contains(key) ? node_.at(key) : empty;
        return Section(child, resolved_[key], key_path(key));
    }

    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key)) throw ConfigError(key_path(key), "unknown key");
    }

private:
    const Json& node_;
    Json& resolved_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename T>
void check(bool ok, const Section& s, const std::string& key, const T& msg) {
    if (!ok) throw ConfigError(s.key_path(key), msg);
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows, const std::string& key) {
    if (rows.empty()) throw ConfigError(key, "empty matrix");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw ConfigError(key, "ragged matrix");
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Eigen::Vector3d to_vec3(const std::vector<double>& v, const std::string& key) {
    if (v.size() != 3) throw ConfigError(key, "expected three components");
    return {v[0], v[1], v[2]};
}

const std::vector<std::vector<double>> case_adjacency{{0.0, 0.5, 1.0}, {0.5, 0.0, 0.0}, {1.0, 0.0, 0.0}};
const std::vector<double> case_pinning{1.0, 0.0, 1.0};
const std::vector<std::vector<double>> case_schedule{{0.0, 0.002}, {100.0, 0.02}, {200.0, 0.1}};

void parse_network(Section s, ScenarioConfig& cfg) {
    NetworkSection& n = cfg.network;
    const double density = s.get("density_per_km2", 16.0);
    check(density > 0.0, s, "density_per_km2", "must be positive");
    n.params.density = density * 1e-6;
    n.params.alpha = s.get("alpha", 2.8);
    check(n.params.alpha > 2.0, s, "alpha", "must exceed 2");
    n.params.fading.m = s.get("m", 2.0);
    check(n.params.fading.m >= 0.5, s, "m", "Nakagami shape must be >= 0.5");
    n.params.fading.omega = s.get("omega", 1.0);
    check(n.params.fading.omega > 0.0, s, "omega", "must be positive");
    const double lo = s.get("height_min_m", 50.0), hi = s.get("height_max_m", 300.0);
    check(lo > 0.0 && hi >= lo, s, "height_max_m", "need 0 < height_min_m <= height_max_m");
    n.params.heights = lo == hi ? HeightLaw::fixed(lo) : HeightLaw::uniform(lo, hi);
    n.region_radius = s.get("region_radius_m", 3000.0);
    check(n.region_radius > 0.0, s, "region_radius_m", "must be positive");
    n.margin = s.get("margin", 1.2);
    check(n.margin >= 1.0, s, "margin", "must be at least 1");
    const std::string field = s.get<std::string>("analytic_field", "finite");
    check(field == "finite" || field == "infinite", s, "analytic_field", "expected 'finite' or 'infinite'");
    n.finite_field = field == "finite";
    n.params.field_radius =
        n.finite_field ? n.region_radius * n.margin : std::numeric_limits<double>::infinity();
    s.finish();
}

void parse_mc(Section s, ScenarioConfig& cfg) {
    McSection& m = cfg.mc;
    const auto trials = s.get<std::int64_t>("trials", 100000);
    check(trials >= 1, s, "trials", "must be at least 1");
    m.trials = static_cast<std::size_t>(trials);
    m.gamma_db = s.get("gamma_db", m.gamma_db);
    check(!m.gamma_db.empty(), s, "gamma_db", "empty grid");
    for (std::size_t i = 1; i < m.gamma_db.size(); ++i)
        check(m.gamma_db[i] > m.gamma_db[i - 1], s, "gamma_db", "grid must be strictly increasing");
    m.alphas = s.get("alphas", std::vector<double>{});
    for (double a : m.alphas) check(a > 2.0, s, "alphas", "every alpha must exceed 2");
    auto dens = s.get("densities_per_km2", std::vector<double>{});
    m.densities.clear();
    for (double d : dens) {
        check(d > 0.0, s, "densities_per_km2", "must be positive");
        m.densities.push_back(d * 1e-6);
    }
    auto names = s.get("schemes", std::vector<std::string>{"proposed_delaunay4"});
    check(!names.empty(), s, "schemes", "need at least one scheme");
    m.schemes.clear();
    for (const auto& name : names) {
        try {
            m.schemes.push_back(Scheme::parse(name));
        } catch (const ConfigError& e) {
            throw ConfigError(s.key_path("schemes"), e.what());
        }
    }
    s.finish();
}

void parse_formation(Section s, ScenarioConfig& cfg) {
    FormationSection& f = cfg.formation;
    f.swarm.adjacency = to_matrix(s.get("adjacency", case_adjacency), s.key_path("adjacency"));
    const auto pin = s.get("pinning", case_pinning);
    f.swarm.pinning = Eigen::Map<const Eigen::VectorXd>(pin.data(), static_cast<Eigen::Index>(pin.size()));
    const auto sched = s.get("gain_schedule", case_schedule);
    f.swarm.schedule.clear();
    for (const auto& row : sched) {
        check(row.size() == 2, s, "gain_schedule", "entries are [t_start_s, gain]");
        f.swarm.schedule.push_back({row[0], row[1]});
    }
    const std::string dyn = s.get<std::string>("dynamics", "case_study");
    check(dyn == "case_study" || dyn == "zero", s, "dynamics", "expected 'case_study' or 'zero'");
    f.case_study_dynamics = dyn == "case_study";
    f.swarm.dynamics = f.case_study_dynamics ? case_study_dynamics() : zero_dynamics();
    f.swarm.speed_cap = s.get("speed_cap_mps", 20.0);
    check(f.swarm.speed_cap >= 0.0, s, "speed_cap_mps", "must be non-negative");
    f.t_end = s.get("t_end_s", 500.0);
    check(f.t_end > 0.0, s, "t_end_s", "must be positive");
    f.dt = s.get("dt_s", 0.01);
    check(f.dt > 0.0 && f.dt <= f.t_end, s, "dt_s", "must be positive and below t_end_s");
    f.stride = s.get("stride", 100);
    check(f.stride >= 1, s, "stride", "must be at least 1");
    f.noise_intensity = s.get("noise_intensity", 0.0);
    check(f.noise_intensity >= 0.0, s, "noise_intensity", "must be non-negative");
    f.jitter = s.get("jitter_m", 20.0);
    check(f.jitter >= 0.0, s, "jitter_m", "must be non-negative");
    f.climb_rate = s.get("climb_rate_mps", 1.5);
    f.lipschitz_samples = s.get("lipschitz_samples", 2000);
    check(f.lipschitz_samples >= 1, s, "lipschitz_samples", "must be at least 1");
    s.finish();
    f.swarm.offsets = Eigen::MatrixX3d::Zero(f.swarm.adjacency.rows(), 3);
    try {
        validate(f.swarm);
    } catch (const ConfigError& e) {
        throw ConfigError("formation." + (e.key == "schedule" ? std::string("gain_schedule") : e.key), e.what());
    }
}

void parse_tracking(Section s, ScenarioConfig& cfg) {
    TrackingSection& t = cfg.tracking;
    ImpulsiveParams& ip = t.impulse;
    ip.interval = s.get("impulse_interval_s", 0.02);
    ip.dx_max = to_vec3(s.get("dx_max_m", std::vector<double>{5, 5, 5}), s.key_path("dx_max_m"));
    ip.dv_max = to_vec3(s.get("dv_max_mps", std::vector<double>{10, 10, 10}), s.key_path("dv_max_mps"));
    ip.r0 = s.get("r0_m", 10.0);
    ip.membership_radius = s.get("membership_radius_m", 0.0);
    const std::string mem = s.get<std::string>("membership", "position_and_velocity");
    check(mem == "position_and_velocity" || mem == "position_only", s, "membership",
          "expected 'position_and_velocity' or 'position_only'");
    ip.membership = mem == "position_only" ? Q0Membership::position_only : Q0Membership::position_and_velocity;
    ip.rho = s.get("rho", 1.3);
    ip.max_strength = s.get("max_strength", 0.5);
    ip.epsilon = s.get("epsilon", 1e-9);
    try {
        validate(ip);
    } catch (const ConfigError& e) {
        throw ConfigError("tracking." + e.key, e.what());
    }
    {
        Section b = s.section("bounds");
        t.bounds.f_followers = b.get("f_followers", 1.0);
        t.bounds.f_leader = b.get("f_leader", 1.0);
        t.bounds.g_target = b.get("g_target", 10.0);
        check(t.bounds.f_followers >= 0.0 && t.bounds.f_leader >= 0.0 && t.bounds.g_target >= 0.0, b, "g_target",
              "bounds must be non-negative");
        b.finish();
    }
    t.target_speed = s.get("target_speed_mps", 10.0);
    check(t.target_speed > 0.0, s, "target_speed_mps", "must be positive");
    t.altitude = s.get("altitude_m", 150.0);
    t.t_end = s.get("t_end_s", 40.0);
    check(t.t_end > 0.0, s, "t_end_s", "must be positive");
    t.dt = s.get("dt_s", 0.01);
    check(t.dt > 0.0, s, "dt_s", "must be positive");
    const double ratio = ip.interval / t.dt;
    check(ratio >= 1.0 && std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio, s, "dt_s",
          "must divide impulse_interval_s");
    t.stride = s.get("stride", 1);
    check(t.stride >= 1, s, "stride", "must be at least 1");
    t.gain = s.get("gain", 0.002);
    check(t.gain > 0.0, s, "gain", "must be positive");
    s.finish();
}

std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v + 0.0;  // no "-0"
    return os.str();
}

}  // namespace

ScenarioKind parse_kind(const std::string& s) {
    if (s == "formation") return ScenarioKind::formation;
    if (s == "tracking") return ScenarioKind::tracking;
    if (s == "coverage") return ScenarioKind::coverage;
    if (s == "rate") return ScenarioKind::rate;
    if (s == "compare") return ScenarioKind::compare;
    if (s == "pdfcheck") return ScenarioKind::pdfcheck;
    if (s == "verify") return ScenarioKind::verify;
    throw ConfigError("scenario", "unknown scenario kind '" + s + "'");
}

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::formation: return "formation";
        case ScenarioKind::tracking: return "tracking";
        case ScenarioKind::coverage: return "coverage";
        case ScenarioKind::rate: return "rate";
        case ScenarioKind::compare: return "compare";
        case ScenarioKind::pdfcheck: return "pdfcheck";
        case ScenarioKind::verify: return "verify";
    }
    return "?";
}

bool is_preset(const std::string& name) {
    static const std::set<std::string> names{"fig4", "fig5", "fig6", "fig7", "fig8", "verify"};
    return names.count(name) > 0;
}

Json preset(const std::string& name) {
    if (name == "fig4") return {{"scenario", "formation"}};
    if (name == "fig5") return {{"scenario", "tracking"}};
    if (name == "fig6") return {{"scenario", "pdfcheck"}};
    if (name == "fig7")
        return {{"scenario", "coverage"},
                {"monte_carlo", {{"alphas", {2.4, 2.6, 2.8, 3.0, 3.2}}, {"densities_per_km2", {8, 16, 32}}}}};
    if (name == "fig8")
        return {{"scenario", "compare"},
                {"monte_carlo",
                 {{"schemes",
                   {"proposed_delaunay4", "no_comp", "conventional_1", "conventional_2", "conventional_3",
                    "conventional_4"}}}}};
    if (name == "verify") return {{"scenario", "verify"}};
    throw ConfigError("scenario", "unknown preset '" + name + "'");
}

Json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config", std::string("parse error: ") + e.what());
    }
}

void apply_override(Json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set", "expected key.path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    Json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError(path, "empty key segment");
        if (!node->is_object()) throw ConfigError(path, "parent is not a section");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = Json::object();
        start = dot + 1;
    }
}

ScenarioConfig parse_config(const Json& config) {
    ScenarioConfig cfg;
    Section root(config, cfg.resolved, "");
    if (!config.contains("scenario")) throw ConfigError("scenario", "missing");
    cfg.kind = parse_kind(root.get<std::string>("scenario", ""));
    cfg.master_seed = root.get<std::uint64_t>("master_seed", 42);
    cfg.threads = root.get<unsigned>("threads", 0);
    parse_network(root.section("network"), cfg);
    parse_mc(root.section("monte_carlo"), cfg);
    parse_formation(root.section("formation"), cfg);
    parse_tracking(root.section("tracking"), cfg);
    {
        Section p = root.section("pdf");
        cfg.pdf.bins = p.get("bins", 100);
        check(cfg.pdf.bins >= 1, p, "bins", "must be at least 1");
        cfg.pdf.max_points = p.get<std::size_t>("max_points", 2000);
        p.finish();
    }
    {
        Section v = root.section("verify");
        cfg.criteria = v.get("criteria", std::vector<int>{});
        for (int c : cfg.criteria) check(c >= 1 && c <= criterion_count, v, "criteria", "criterion out of range");
        v.finish();
    }
    root.finish();
    return cfg;
}

FormationSetup case_study_formation(const ScenarioConfig& cfg) {
    FormationSetup out;
    out.swarm = cfg.formation.swarm;
    const Eigen::Index n = out.swarm.followers();
    if (n != 3) throw ConfigError("formation.adjacency", "Delaunay-cell targets need exactly three followers");
    DeploymentSpec ds;
    ds.density = cfg.network.params.density;
    ds.region_radius = cfg.network.region_radius;
    ds.margin = cfg.network.margin;
    ds.heights = cfg.network.params.heights;
    const Deployment dep = sample_deployment(ds, cfg.master_seed);
    const Triangulation tri = delaunay(dep.planar);
    Engine rng = make_engine(cfg.master_seed, stream::formation);
    const auto target = formation_target(dep, tri, ds.heights, rng);
    out.swarm.offsets.resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) out.swarm.offsets.row(i) = (target[i + 1] - target[0]).transpose();

    std::uniform_real_distribution<double> jitter(-cfg.formation.jitter, cfg.formation.jitter);
    out.init.leader_vel = Eigen::Vector3d(0.0, 0.0, cfg.formation.climb_rate);
    out.init.follower_pos.resize(n, 3);
    out.init.follower_vel = Eigen::MatrixX3d::Zero(n, 3);
    // Followers wait on the ground below their slots.
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = out.swarm.offsets(i, 0) + jitter(rng);
        const double y = out.swarm.offsets(i, 1) + jitter(rng);
        out.init.follower_pos.row(i) << x, y, 0.0;
    }
    return out;
}

TrackingSetup case_study_tracking(const ScenarioConfig& cfg) {
    const FormationSetup f = case_study_formation(cfg);
    TrackingSetup out{f.swarm, cfg.tracking.impulse,
                      case_study_zigzag(cfg.tracking.target_speed, cfg.tracking.altitude), SwarmState{}};
    out.swarm.schedule = {{0.0, cfg.tracking.gain}};
    // The swarm flies level at the operating altitude, keeping the cell's planar shape.
    out.swarm.offsets.col(2).setZero();
    const Eigen::Index n = out.swarm.followers();
    Engine rng = make_engine(cfg.master_seed, stream::formation, 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r0 = out.impulse.r0;
    auto in_ball = [&](bool planar) {
        Eigen::Vector3d p;
        do {
            p << 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0, planar ? 0.0 : 2.0 * u(rng) - 1.0;
        } while (p.squaredNorm() > 1.0);
        return Eigen::Vector3d(r0 * p);
    };
    const TargetState g = out.target.initial();
    out.init.leader_pos = g.pos + in_ball(true);
    out.init.follower_pos.resize(n, 3);
    out.init.follower_vel = Eigen::MatrixX3d::Zero(n, 3);
    for (Eigen::Index i = 0; i < n; ++i)
        out.init.follower_pos.row(i) = (g.pos + out.swarm.offsets.row(i).transpose() + in_ball(false)).transpose();
    return out;
}

McConfig mc_config(const ScenarioConfig& cfg) {
    McConfig m;
    m.trials = cfg.mc.trials;
    m.master_seed = cfg.master_seed;
    m.network = cfg.network.params;
    m.region_radius = cfg.network.region_radius;
    m.margin = cfg.network.margin;
    m.scheme = cfg.mc.schemes.front();
    for (double db : cfg.mc.gamma_db) m.gamma_grid.push_back(db_to_linear(db));
    m.threads = cfg.threads;
    return m;
}

NetworkParams analytic_network(const ScenarioConfig& cfg, double alpha, double density) {
    NetworkParams p = cfg.network.params;
    p.alpha = alpha;
    p.density = density;
    return p;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_formation_csv(std::ostream& os, const SwarmParams& p, const FormationRun& run) {
    os << "t,agent_id,ex,ey,ez,evx,evy,evz,err_pos,err_vel\n";
    for (const auto& e : run.errors)
        for (Eigen::Index i = 0; i < p.followers(); ++i) {
            os << csv_number(e.t) << ',' << i + 1;
            for (int k = 0; k < 3; ++k) os << ',' << csv_number(e.pos(i, k));
            for (int k = 0; k < 3; ++k) os << ',' << csv_number(e.vel(i, k));
            os << ',' << csv_number(e.pos.row(i).norm()) << ',' << csv_number(e.vel.row(i).norm()) << '\n';
        }
}

void write_trajectory_csv(std::ostream& os, const SwarmParams& p, const std::vector<SwarmState>& states,
                          const std::vector<char>& impulse_flags, const std::vector<TargetState>* targets) {
    os << "t,agent_id,role,x,y,z,vx,vy,vz,err_pos,err_vel" << (targets ? ",impulse" : "") << '\n';
    for (std::size_t k = 0; k < states.size(); ++k) {
        const SwarmState& s = states[k];
        auto row = [&](Eigen::Index id, const char* role, const Eigen::Vector3d& x, const Eigen::Vector3d& v,
                       double ep, double ev) {
            os << csv_number(s.t) << ',' << id << ',' << role;
            for (int i = 0; i < 3; ++i) os << ',' << csv_number(x(i));
            for (int i = 0; i < 3; ++i) os << ',' << csv_number(v(i));
            os << ',' << csv_number(ep) << ',' << csv_number(ev);
            if (targets) os << ',' << (impulse_flags.at(k) ? 1 : 0);
            os << '\n';
        };
        if (targets) {
            const TargetState& g = (*targets)[k];
            row(0, "leader", s.leader_pos, s.leader_vel, (s.leader_pos - g.pos).norm(), (s.leader_vel - g.vel).norm());
            for (Eigen::Index i = 0; i < p.followers(); ++i) {
                const Eigen::Vector3d x = s.follower_pos.row(i), v = s.follower_vel.row(i);
                row(i + 1, "follower", x, v, (x - p.offsets.row(i).transpose() - g.pos).norm(), (v - g.vel).norm());
            }
        } else {
            const FormationErrors e = formation_errors(p, s);
            row(0, "leader", s.leader_pos, s.leader_vel, 0.0, 0.0);
            for (Eigen::Index i = 0; i < p.followers(); ++i)
                row(i + 1, "follower", s.follower_pos.row(i), s.follower_vel.row(i), e.pos.row(i).norm(),
                    e.vel.row(i).norm());
        }
    }
}

void write_impulse_log(std::ostream& os, const std::vector<ImpulseRecord>& log) {
    os << "t_k,agent_id,ell,dx,dy,dz,dvx,dvy,dvz\n";
    for (const auto& r : log) {
        os << csv_number(r.t) << ',' << r.agent << ',' << csv_number(r.ell);
        for (int k = 0; k < 3; ++k) os << ',' << csv_number(r.dx(k));
        for (int k = 0; k < 3; ++k) os << ',' << csv_number(r.dv(k));
        os << '\n';
    }
}

namespace {

struct Artifacts {
    std::filesystem::path dir;
    std::vector<std::string> files;

    std::ofstream open(const std::string& name) {
        files.push_back(name);
        std::ofstream os(dir / name);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        return os;
    }
};

const char* coverage_header = "scheme,alpha,lambda_per_km2,m,gamma_db,gamma_linear,coverage,std_err,trials\n";
const char* rate_header = "scheme,alpha,lambda_per_km2,m,rate_nats,std_err,trials\n";

void coverage_rows(std::ostream& os, const std::string& scheme, double alpha, double density, const ScenarioConfig& cfg,
                   const std::vector<MetricEstimate>& est) {
    for (std::size_t k = 0; k < est.size(); ++k)
        os << scheme << ',' << csv_number(alpha) << ',' << csv_number(density * 1e6) << ','
           << csv_number(cfg.network.params.fading.m) << ',' << csv_number(cfg.mc.gamma_db[k]) << ','
           << csv_number(db_to_linear(cfg.mc.gamma_db[k])) << ',' << csv_number(est[k].value) << ','
           << csv_number(est[k].std_err) << ',' << est[k].trials_used << '\n';
}

void rate_row(std::ostream& os, const std::string& scheme, double alpha, double density, const ScenarioConfig& cfg,
              const MetricEstimate& est) {
    os << scheme << ',' << csv_number(alpha) << ',' << csv_number(density * 1e6) << ','
       << csv_number(cfg.network.params.fading.m) << ',' << csv_number(est.value) << ',' << csv_number(est.std_err)
       << ',' << est.trials_used << '\n';
}

std::vector<double> alphas_of(const ScenarioConfig& cfg) {
    return cfg.mc.alphas.empty() ? std::vector<double>{cfg.network.params.alpha} : cfg.mc.alphas;
}

std::vector<double> densities_of(const ScenarioConfig& cfg) {
    return cfg.mc.densities.empty() ? std::vector<double>{cfg.network.params.density} : cfg.mc.densities;
}

void run_formation(const ScenarioConfig& cfg, Artifacts& art, Json& results, std::ostream& log) {
    const FormationSetup setup = case_study_formation(cfg);
    const auto& f = cfg.formation;
    const LipschitzEstimate lip = estimate_lipschitz(f.swarm.dynamics, FlightEnvelope{}, f.lipschitz_samples,
                                                     cfg.master_seed);
    const Theorem1Report rep =
        theorem1_check(laplacian(setup.swarm.adjacency), setup.swarm.pinning, lip.rho1, lip.rho2, setup.swarm.schedule);
    if (!rep.all_satisfied())
        log << "warning: gain schedule is below the sufficient bound c_min = " << rep.c_min << " on some segment\n";
    const FormationRun run = simulate_formation(setup.swarm, setup.init, f.t_end, f.dt, f.stride,
                                                {f.noise_intensity, derive_seed(cfg.master_seed, stream::noise)});
    {
        auto os = art.open("fig4_errors.csv");
        write_formation_csv(os, setup.swarm, run);
    }
    {
        auto os = art.open("trajectory.csv");
        write_trajectory_csv(os, setup.swarm, run.samples, {}, nullptr);
    }
    const auto& e0 = run.errors.front();
    const auto& e1 = run.errors.back();
    results["diverged"] = run.diverged;
    if (run.diverged) results["diagnostic"] = run.diagnostic;
    results["velocity_error_ratio"] = e1.vel.norm() / e0.vel.norm();
    results["position_error_ratio"] = e1.pos.norm() / e0.pos.norm();
    results["rho1"] = lip.rho1;
    results["rho2"] = lip.rho2;
    results["q"] = std::vector<double>(rep.q.data(), rep.q.data() + rep.q.size());
    results["lambda_min_q"] = rep.lambda_min_q;
    results["lambda_max_p"] = rep.lambda_max_p;
    results["c_min"] = rep.c_min;
    results["schedule_satisfied"] = rep.satisfied_for;
    if (run.diverged) throw NumericError("formation diverged: " + run.diagnostic);
}

void run_tracking(const ScenarioConfig& cfg, Artifacts& art, Json& results) {
    const TrackingSetup setup = case_study_tracking(cfg);
    const auto& t = cfg.tracking;
    const TrackingRun run = simulate_tracking(setup.swarm, setup.impulse, setup.target, setup.init, t.t_end, t.dt,
                                              t.bounds, t.stride);
    {
        auto os = art.open("fig5_errors.csv");
        os << "t,agent_id,role,ex,ey,ez,evx,evy,evz,err_pos,err_vel,impulse\n";
        for (const auto& smp : run.samples)
            for (Eigen::Index i = 0; i < smp.pos_err.rows(); ++i) {
                os << csv_number(smp.t) << ',' << i << ',' << (i == 0 ? "leader" : "follower");
                for (int k = 0; k < 3; ++k) os << ',' << csv_number(smp.pos_err(i, k));
                for (int k = 0; k < 3; ++k) os << ',' << csv_number(smp.vel_err(i, k));
                os << ',' << csv_number(smp.pos_err.row(i).norm()) << ',' << csv_number(smp.vel_err.row(i).norm())
                   << ',' << (smp.impulse ? 1 : 0) << '\n';
            }
    }
    {
        std::vector<SwarmState> states;
        std::vector<char> flags;
        std::vector<TargetState> targets;
        for (const auto& smp : run.samples) {
            states.push_back(smp.state);
            flags.push_back(smp.impulse);
            targets.push_back(smp.target);
        }
        auto os = art.open("trajectory.csv");
        write_trajectory_csv(os, setup.swarm, states, flags, &targets);
    }
    {
        auto os = art.open("impulses.csv");
        write_impulse_log(os, run.impulses);
    }
    const auto& r = run.report;
    results["eta"] = r.eta;
    results["lambda_max_g"] = r.lambda_max_g;
    results["beta"] = r.beta;
    results["rho"] = r.rho;
    results["rho_sup"] = r.rho_sup;
    results["r_q"] = r.r_q;
    results["condition_satisfied"] = r.satisfied;
    if (!r.condition_values.empty()) {
        const auto [lo, hi] = std::minmax_element(r.condition_values.begin(), r.condition_values.end());
        results["condition_min"] = *lo;
        results["condition_max"] = *hi;
    }
    results["impulses"] = run.impulse_times.size();
    results["bounds_respected"] = run.bounds_respected;
    results["diverged"] = run.diverged;
    if (run.diverged) throw NumericError("tracking diverged: " + run.diagnostic);
}

void run_coverage(const ScenarioConfig& cfg, Artifacts& art, Json& results, bool write_coverage) {
    McConfig mc = mc_config(cfg);
    const auto alphas = alphas_of(cfg);
    std::ofstream cov, rate;
    if (write_coverage) {
        cov = art.open("fig7_coverage.csv");
        cov << coverage_header;
    }
    rate = art.open("fig7_rate.csv");
    rate << rate_header;
    long resamples = 0;
    for (double density : densities_of(cfg)) {
        mc.network.density = density;
        const BatchResult b = run_batch(mc, {cfg.mc.schemes.front()}, alphas);
        resamples += b.resamples;
        const std::string scheme = cfg.mc.schemes.front().name();
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            const NetworkParams np = analytic_network(cfg, alphas[a], density);
            if (write_coverage) {
                coverage_rows(cov, scheme, alphas[a], density, cfg, coverage_from_samples(b.at(0, a), mc.gamma_grid));
                std::vector<MetricEstimate> an;
                for (double g : mc.gamma_grid) {
                    const Estimate e = coverage_probability(g, np);
                    an.push_back({e.value, e.error, 0});
                }
                coverage_rows(cov, "analytic", alphas[a], density, cfg, an);
            }
            rate_row(rate, scheme, alphas[a], density, cfg, rate_from_samples(b.at(0, a)));
            const Estimate direct = ergodic_rate(np, RateForm::direct);
            rate_row(rate, "analytic", alphas[a], density, cfg, {direct.value, direct.error, 0});
            try {
                const Estimate pcf = ergodic_rate(np, RateForm::parabolic_cylinder);
                rate_row(rate, "analytic_pcf", alphas[a], density, cfg, {pcf.value, pcf.error, 0});
            } catch (const ConditionError&) {
            }
        }
    }
    results["resamples"] = resamples;
}

void run_compare(const ScenarioConfig& cfg, Artifacts& art, Json& results) {
    const McConfig mc = mc_config(cfg);
    const BatchResult b = run_batch(mc, cfg.mc.schemes, {cfg.network.params.alpha});
    auto os = art.open("fig8_compare.csv");
    os << coverage_header;
    for (std::size_t s = 0; s < b.schemes.size(); ++s) {
        const auto est = coverage_from_samples(b.at(s, 0), mc.gamma_grid);
        coverage_rows(os, b.schemes[s].name(), cfg.network.params.alpha, cfg.network.params.density, cfg, est);
        Json curve = Json::array();
        for (const auto& e : est) curve.push_back(e.value);
        results["coverage"][b.schemes[s].name()] = curve;
    }
    results["resamples"] = b.resamples;
}

void run_pdfcheck(const ScenarioConfig& cfg, Artifacts& art, Json& results) {
    McConfig mc = mc_config(cfg);
    const double alpha = cfg.network.params.alpha;
    const BatchResult b = run_batch(mc, {Scheme::proposed()}, {alpha});
    const NetworkParams np = cfg.network.params;
    const GammaApprox sig = lemma1_params(np), intf = lemma2_params(np);
    struct Quantity {
        const char* name;
        std::vector<double> samples;
        std::function<double(double)> pdf, cdf;
    };
    std::vector<Quantity> qs;
    qs.push_back({"signal", extract(b.at(0, 0), &SirSample::signal), [&](double x) { return signal_pdf(sig, x); },
                  [&](double x) { return signal_cdf(sig, x); }});
    qs.push_back({"interference", extract(b.at(0, 0), &SirSample::interference),
                  [&](double x) { return interference_pdf(intf, x); },
                  [&](double x) { return interference_cdf(intf, x); }});
    qs.push_back({"sir", extract(b.at(0, 0), &SirSample::sir), [&](double x) { return sir_pdf(sig, intf, x); },
                  [&](double x) { return 1.0 - coverage_probability(sig, intf, x).value; }});
    auto os = art.open("fig6_pdfs.csv");
    os << "quantity,bin_lo,bin_hi,empirical_pdf,model_pdf\n";
    for (auto& q : qs) {
        std::vector<double> sorted = q.samples;
        std::sort(sorted.begin(), sorted.end());
        const double lo = sorted[sorted.size() / 2000], hi = sorted[sorted.size() - 1 - sorted.size() / 2000];
        const Histogram h = empirical_pdf(q.samples, {cfg.pdf.bins, lo, hi, false});
        for (Eigen::Index k = 0; k < h.density.size(); ++k) {
            const double mid = 0.5 * (h.edges(k) + h.edges(k + 1));
            os << q.name << ',' << csv_number(h.edges(k)) << ',' << csv_number(h.edges(k + 1)) << ','
               << csv_number(h.density(k)) << ',' << csv_number(q.pdf(mid)) << '\n';
        }
        results["sup_cdf_distance"][q.name] = sup_cdf_distance(q.samples, q.cdf, cfg.pdf.max_points);
    }
    results["signal_shape"] = sig.shape;
    results["signal_scale"] = sig.scale;
    results["interference_shape"] = intf.shape;
    results["interference_scale"] = intf.scale;
}

bool run_verify(const ScenarioConfig& cfg, Artifacts& art, Json& results, std::ostream& log) {
    VerifyOptions vo{cfg.master_seed, cfg.mc.trials, cfg.threads};
    std::vector<int> ids = cfg.criteria;
    if (ids.empty())
        for (int i = 1; i <= criterion_count; ++i) ids.push_back(i);
    bool all = true;
    auto os = art.open("verify.txt");
    for (int id : ids) {
        const CriterionResult r = run_criterion(id, vo);
        const std::string line = format_result(r);
        log << line << '\n' << std::flush;
        os << line << '\n';
        results["criteria"][std::to_string(id)] = r.pass;
        all = all && r.pass;
    }
    results["all_pass"] = all;
    return all;
}

}  // namespace

int run_scenario(const std::string& config_or_preset, const RunOptions& opts, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioConfig cfg;
    try {
        Json raw = is_preset(config_or_preset) ? preset(config_or_preset) : load_config_file(config_or_preset);
        for (const auto& o : opts.overrides) apply_override(raw, o);
        if (opts.seed) raw["master_seed"] = *opts.seed;
        if (opts.trials) raw["monte_carlo"]["trials"] = *opts.trials;
        if (opts.threads) raw["threads"] = *opts.threads;
        cfg = parse_config(raw);
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        return 1;
    }

    Artifacts art{opts.out_dir, {}};
    Json results = Json::object();
    bool verified = true;
    try {
        std::filesystem::create_directories(opts.out_dir);
        switch (cfg.kind) {
            case ScenarioKind::formation: run_formation(cfg, art, results, log); break;
            case ScenarioKind::tracking: run_tracking(cfg, art, results); break;
            case ScenarioKind::coverage: run_coverage(cfg, art, results, true); break;
            case ScenarioKind::rate: run_coverage(cfg, art, results, false); break;
            case ScenarioKind::compare: run_compare(cfg, art, results); break;
            case ScenarioKind::pdfcheck: run_pdfcheck(cfg, art, results); break;
            case ScenarioKind::verify: verified = run_verify(cfg, art, results, log); break;
        }
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        log << "runtime failure: " << e.what() << '\n';
        return 2;
    }

    const std::string canonical = cfg.resolved.dump();
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical);
    Json manifest;
    manifest["version"] = UAVCOMP_VERSION;
    manifest["scenario"] = to_string(cfg.kind);
    manifest["master_seed"] = cfg.master_seed;
    manifest["config_hash"] = "fnv1a64:" + hash.str();
    manifest["config"] = cfg.resolved;
    manifest["artifacts"] = art.files;
    manifest["results"] = results;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    {
        std::ofstream os(opts.out_dir / "manifest.json");
        os << std::setw(2) << manifest << '\n';
    }
    if (cfg.kind != ScenarioKind::verify) log << std::setw(2) << results << '\n';
    log << "wrote " << art.files.size() + 1 << " files to " << opts.out_dir.string() << '\n';
    return verified ? 0 : 3;
}

}  // namespace uavcomp
