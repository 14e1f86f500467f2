#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "uavcomp/analytic.hpp"
#include "uavcomp/formation.hpp"
#include "uavcomp/montecarlo.hpp"
#include "uavcomp/tracking.hpp"

namespace uavcomp {

using Json = nlohmann::json;

enum class ScenarioKind { formation, tracking, coverage, rate, compare, pdfcheck, verify };

ScenarioKind parse_kind(const std::string& s);
std::string to_string(ScenarioKind k);

struct NetworkSection {
    NetworkParams params{};
    double region_radius = 3000.0;
    double margin = 1.2;
    bool finite_field = true;  // analytic interferers live on the sampling disk
};

struct McSection {
    std::size_t trials = 100000;
    std::vector<double> gamma_db{-10, -5, 0, 5, 10, 15, 20};
    std::vector<double> alphas{};      // empty: network alpha only
    std::vector<double> densities{};   // per m^2; empty: network density only
    std::vector<Scheme> schemes{Scheme::proposed()};
};

struct FormationSection {
    SwarmParams swarm{};
    bool case_study_dynamics = true;
    double t_end = 500.0;
    double dt = 0.01;
    int stride = 100;
    double noise_intensity = 0.0;
    double jitter = 20.0;       // m, follower start spread around its ground slot
    double climb_rate = 1.5;    // m/s, initial vertical leader velocity
    int lipschitz_samples = 2000;
};

struct TrackingSection {
    ImpulsiveParams impulse{};
    DynamicsBounds bounds{1.0, 1.0, 10.0};
    double target_speed = 10.0;
    double altitude = 150.0;
    double t_end = 40.0;
    double dt = 0.01;
    int stride = 1;
    double gain = 0.002;
};

struct PdfSection {
    int bins = 100;
    std::size_t max_points = 2000;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::coverage;
    std::uint64_t master_seed = 42;
    unsigned threads = 0;
    NetworkSection network{};
    McSection mc{};
    FormationSection formation{};
    TrackingSection tracking{};
    PdfSection pdf{};
    std::vector<int> criteria{};  // verify only; empty runs all
    Json resolved;                // post-override values including defaults
};

// Built-in configurations: fig4 .. fig8 and verify.
Json preset(const std::string& name);
bool is_preset(const std::string& name);
Json load_config_file(const std::filesystem::path& path);

// "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
void apply_override(Json& config, const std::string& assignment);

ScenarioConfig parse_config(const Json& config);

// Case-study swarm: printed graph, Delaunay-cell offsets from the master seed's deployment.
struct FormationSetup {
    SwarmParams swarm;
    SwarmState init;
};

FormationSetup case_study_formation(const ScenarioConfig& cfg);

struct TrackingSetup {
    SwarmParams swarm;
    ImpulsiveParams impulse;
    TargetModel target;
    SwarmState init;
};

TrackingSetup case_study_tracking(const ScenarioConfig& cfg);

McConfig mc_config(const ScenarioConfig& cfg);
NetworkParams analytic_network(const ScenarioConfig& cfg, double alpha, double density);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::uint64_t fnv1a64(const std::string& bytes);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<unsigned> threads;
    std::filesystem::path out_dir = "out";
    std::vector<std::string> overrides;
};

// Exit codes: 0 ok, 1 configuration error, 2 runtime failure, 3 verification failed.
int run_scenario(const std::string& config_or_preset, const RunOptions& opts, std::ostream& log);

void write_formation_csv(std::ostream& os, const SwarmParams& p, const FormationRun& run);
void write_trajectory_csv(std::ostream& os, const SwarmParams& p, const std::vector<SwarmState>& states,
                          const std::vector<char>& impulse_flags, const std::vector<TargetState>* targets);
void write_impulse_log(std::ostream& os, const std::vector<ImpulseRecord>& log);

}  // namespace uavcomp
