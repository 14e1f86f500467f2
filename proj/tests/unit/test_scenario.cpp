#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "uavcomp/error.hpp"
#include "uavcomp/scenario.hpp"

using namespace uavcomp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("uavcomp_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

int run(const std::string& what, const fs::path& out, std::vector<std::string> overrides,
        std::optional<std::size_t> trials = std::nullopt) {
    RunOptions o;
    o.out_dir = out;
    o.overrides = std::move(overrides);
    o.trials = trials;
    o.threads = 2;
    std::ostringstream log;
    return run_scenario(what, o, log);
}

}  // namespace

TEST_SUITE("scenario") {
    TEST_CASE("FNV-1a reference vectors") {
        CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
        CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    }

    TEST_CASE("overrides are key-path substitutions") {
        Json j = preset("fig7");
        apply_override(j, "network.alpha=3.1");
        apply_override(j, "monte_carlo.schemes=[\"no_comp\"]");
        apply_override(j, "network.analytic_field=infinite");
        CHECK(j["network"]["alpha"] == 3.1);
        CHECK(j["monte_carlo"]["schemes"][0] == "no_comp");
        CHECK(j["network"]["analytic_field"] == "infinite");
        CHECK_THROWS_AS(apply_override(j, "novalue"), ConfigError);
        CHECK_THROWS_AS(apply_override(j, "scenario.x=1"), ConfigError);
        const ScenarioConfig cfg = parse_config(j);
        CHECK(cfg.network.params.alpha == 3.1);
        CHECK_FALSE(cfg.network.finite_field);
        CHECK(cfg.resolved["network"]["alpha"] == 3.1);
    }

    TEST_CASE("unknown keys name their path") {
        Json j = preset("fig6");
        apply_override(j, "network.bogus=1");
        try {
            parse_config(j);
            FAIL("expected a configuration error");
        } catch (const ConfigError& e) {
            CHECK(e.key == "network.bogus");
        }
        j = preset("fig4");
        apply_override(j, "formaton.t_end_s=3");
        CHECK_THROWS_AS(parse_config(j), ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"scenario", "dance"}}), ConfigError);
        CHECK_THROWS_AS(parse_config(Json::object()), ConfigError);
    }

    TEST_CASE("presets parse and record their defaults") {
        for (const char* name : {"fig4", "fig5", "fig6", "fig7", "fig8", "verify"}) {
            CHECK(is_preset(name));
            const ScenarioConfig cfg = parse_config(preset(name));
            CHECK(cfg.master_seed == 42);
            CHECK(cfg.resolved.contains("network"));
        }
        CHECK_FALSE(is_preset("fig9"));
        const ScenarioConfig f = parse_config(preset("fig4"));
        CHECK(f.kind == ScenarioKind::formation);
        CHECK(f.resolved["formation"]["speed_cap_mps"] == 20.0);
        CHECK(f.formation.swarm.schedule.size() == 3);
        const ScenarioConfig c = parse_config(preset("fig7"));
        CHECK(c.mc.alphas.size() == 5);
        CHECK(c.mc.densities.size() == 3);
        CHECK(c.network.params.density == doctest::Approx(16e-6));
        CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    }

    TEST_CASE("case-study formation setup") {
        const ScenarioConfig cfg = parse_config(preset("fig4"));
        const FormationSetup s = case_study_formation(cfg);
        CHECK(s.swarm.followers() == 3);
        CHECK(s.init.leader_pos.isZero());
        CHECK(s.init.follower_pos.col(2).isZero());
        CHECK(s.swarm.offsets.allFinite());
        CHECK(s.swarm.offsets.rowwise().norm().minCoeff() > 0.0);
        const FormationSetup again = case_study_formation(cfg);
        CHECK(again.swarm.offsets == s.swarm.offsets);
    }

    TEST_CASE("case-study tracking setup starts near the target") {
        const ScenarioConfig cfg = parse_config(preset("fig5"));
        const TrackingSetup s = case_study_tracking(cfg);
        CHECK((s.init.leader_pos - s.target.initial().pos).norm() <= cfg.tracking.impulse.r0);
        for (Eigen::Index i = 0; i < 3; ++i) {
            const Eigen::Vector3d gap =
                s.init.follower_pos.row(i).transpose() - s.swarm.offsets.row(i).transpose() - s.target.initial().pos;
            CHECK(gap.norm() <= cfg.tracking.impulse.r0);
        }
        CHECK(s.swarm.offsets.col(2).isZero());
    }

    TEST_CASE("formation run writes its CSVs and manifest") {
        const fs::path out = scratch("fig4");
        CHECK(run("fig4", out, {"formation.t_end_s=2"}) == 0);
        CHECK(first_line(out / "fig4_errors.csv") == "t,agent_id,ex,ey,ez,evx,evy,evz,err_pos,err_vel");
        const Json m = Json::parse(slurp(out / "manifest.json"));
        CHECK(m["scenario"] == "formation");
        CHECK(m["master_seed"] == 42);
        CHECK(m["config"]["formation"]["t_end_s"] == 2.0);
        CHECK(m["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
        CHECK(m["artifacts"].size() == 2);
    }

    TEST_CASE("reruns with the same seed are byte-identical") {
        const fs::path a = scratch("fig6a"), b = scratch("fig6b"), c = scratch("fig6c");
        CHECK(run("fig6", a, {}, 300) == 0);
        CHECK(run("fig6", b, {}, 300) == 0);
        CHECK(run("fig6", c, {"master_seed=43"}, 300) == 0);
        const std::string pa = slurp(a / "fig6_pdfs.csv");
        CHECK(first_line(a / "fig6_pdfs.csv") == "quantity,bin_lo,bin_hi,empirical_pdf,model_pdf");
        CHECK(pa == slurp(b / "fig6_pdfs.csv"));
        CHECK(pa != slurp(c / "fig6_pdfs.csv"));
        const Json ma = Json::parse(slurp(a / "manifest.json")), mb = Json::parse(slurp(b / "manifest.json"));
        CHECK(ma["config_hash"] == mb["config_hash"]);
    }

    TEST_CASE("tracking run logs impulses") {
        const fs::path out = scratch("fig5");
        CHECK(run("fig5", out, {"tracking.t_end_s=1"}) == 0);
        CHECK(fs::exists(out / "fig5_errors.csv"));
        CHECK(fs::exists(out / "impulses.csv"));
        const Json m = Json::parse(slurp(out / "manifest.json"));
        CHECK(m["results"].contains("eta"));
    }

    TEST_CASE("coverage run emits analytic rows beside Monte-Carlo rows") {
        const fs::path out = scratch("fig7");
        CHECK(run("fig7", out, {"monte_carlo.alphas=[2.8]", "monte_carlo.densities_per_km2=[16]"}, 200) == 0);
        const std::string csv = slurp(out / "fig7_coverage.csv");
        CHECK(csv.find("\nanalytic,2.8,16,") != std::string::npos);
        CHECK(csv.find("\nproposed_delaunay4,2.8,16,") != std::string::npos);
        CHECK(fs::exists(out / "fig7_rate.csv"));
    }

    TEST_CASE("exit codes") {
        CHECK(run("fig6", scratch("bad"), {"network.bogus=1"}) == 1);
        CHECK(run("/nonexistent/config.json", scratch("missing"), {}) == 1);
        CHECK(run("fig7", scratch("badalpha"), {"network.alpha=1.5"}) == 1);
        CHECK(run("verify", scratch("v8"), {"verify.criteria=[8]"}) == 0);
        CHECK(run("verify", scratch("v6"), {"verify.criteria=[6]"}) == 3);
    }

    TEST_CASE("config files load from disk") {
        const fs::path dir = scratch("file");
        fs::create_directories(dir);
        {
            std::ofstream os(dir / "cfg.json");
            os << R"({"scenario": "tracking", "tracking": {"t_end_s": 0.5}})";
        }
        CHECK(run((dir / "cfg.json").string(), dir / "out", {}) == 0);
        {
            std::ofstream os(dir / "broken.json");
            os << "{scenario";
        }
        CHECK(run((dir / "broken.json").string(), dir / "out2", {}) == 1);
    }
}
