#include <cmath>
#include <numeric>

#include <boost/math/distributions/exponential.hpp>

#include "doctest.h"
#include "uavcomp/error.hpp"
#include "uavcomp/montecarlo.hpp"

using namespace uavcomp;

namespace {

McConfig small_config(std::size_t trials) {
    McConfig cfg;
    cfg.trials = trials;
    cfg.master_seed = 7;
    cfg.network.field_radius = cfg.region_radius * cfg.margin;
    cfg.gamma_grid = {0.1, 1.0, 10.0};
    return cfg;
}

TrialDraw four_uavs() {
    TrialDraw d;
    d.deployment.planar.resize(4, 2);
    d.deployment.planar << 100, 0, 0, 200, -300, 0, 0, -400;
    d.deployment.heights = Eigen::Vector4d(100, 100, 100, 100);
    d.fading.amplitude = Eigen::Vector4d(1, 1, 1, 1);
    d.fading.power = Eigen::Vector4d(1, 1, 1, 1);
    return d;
}

bool same(const SirSample& a, const SirSample& b) {
    return a.signal == b.signal && a.interference == b.interference && a.sir == b.sir;
}

}  // namespace

TEST_SUITE("montecarlo") {
    TEST_CASE("scheme names round trip") {
        for (const Scheme s : {Scheme::proposed(), Scheme::no_comp(), Scheme::conventional(2),
                               Scheme::conventional(3, true)})
            CHECK(Scheme::parse(s.name()).name() == s.name());
        CHECK(Scheme::conventional(4, true).name() == "conventional_4_distance");
        CHECK_THROWS_AS(Scheme::parse("conventional_5"), ConfigError);
        CHECK_THROWS_AS(Scheme::parse("best"), ConfigError);
    }

    TEST_CASE("trials are pure functions of seed and index") {
        const McConfig cfg = small_config(10);
        CHECK(same(run_trial(cfg, 3), run_trial(cfg, 3)));
        CHECK_FALSE(same(run_trial(cfg, 3), run_trial(cfg, 4)));
        McConfig other = cfg;
        other.master_seed = 8;
        CHECK_FALSE(same(run_trial(cfg, 3), run_trial(other, 3)));
    }

    TEST_CASE("serving sets per scheme") {
        const TrialDraw d = four_uavs();
        CHECK(serving_set(d, Scheme::no_comp(), 3.0) == std::vector<Eigen::Index>{0});
        CHECK(serving_set(d, Scheme::proposed(), 3.0).size() == 4);
        CHECK(serving_set(d, Scheme::conventional(2), 3.0) == std::vector<Eigen::Index>{0, 1});
        TrialDraw faded = d;
        faded.fading.amplitude(3) = 100.0;  // received power overtakes distance
        CHECK(serving_set(faded, Scheme::conventional(1), 3.0) == std::vector<Eigen::Index>{3});
        CHECK(serving_set(faded, Scheme::conventional(1, true), 3.0) == std::vector<Eigen::Index>{0});
    }

    TEST_CASE("single serving UAV sees the other three as interference") {
        const TrialDraw d = four_uavs();
        const SirSample s = evaluate_trial(d, Scheme::no_comp(), 2.0);
        const double g0 = 1.0 / (100.0 * 100.0 + 100.0 * 100.0);
        const double intf = 1.0 / (200.0 * 200 + 1e4) + 1.0 / (300.0 * 300 + 1e4) + 1.0 / (400.0 * 400 + 1e4);
        CHECK(s.signal == doctest::Approx(g0).epsilon(1e-14));
        CHECK(s.interference == doctest::Approx(intf).epsilon(1e-14));
        CHECK(std::isinf(evaluate_trial(d, Scheme::proposed(), 2.0).sir));
    }

    TEST_CASE("batch is identical for any thread count and matches single trials") {
        McConfig cfg = small_config(257);
        const std::vector<Scheme> schemes{Scheme::proposed(), Scheme::conventional(2), Scheme::no_comp()};
        cfg.threads = 1;
        const BatchResult a = run_batch(cfg, schemes, {2.4, 3.0});
        cfg.threads = 5;
        const BatchResult b = run_batch(cfg, schemes, {2.4, 3.0});
        for (std::size_t k = 0; k < a.samples.size(); ++k)
            for (std::size_t t = 0; t < cfg.trials; ++t) CHECK(same(a.samples[k][t], b.samples[k][t]));
        McConfig one = cfg;
        one.scheme = Scheme::conventional(2);
        one.network.alpha = 3.0;
        CHECK(same(run_trial(one, 100), a.at(1, 1)[100]));
    }

    TEST_CASE("coverage ordering under common random numbers") {
        McConfig cfg = small_config(3000);
        const BatchResult b = run_batch(cfg,
                                        {Scheme::no_comp(), Scheme::conventional(1), Scheme::conventional(2),
                                         Scheme::conventional(3), Scheme::conventional(4), Scheme::proposed()},
                                        {2.8});
        std::vector<std::vector<MetricEstimate>> cov;
        for (std::size_t s = 0; s < 6; ++s) cov.push_back(coverage_from_samples(b.at(s, 0), cfg.gamma_grid));
        for (std::size_t g = 0; g < cfg.gamma_grid.size(); ++g) {
            for (std::size_t s = 2; s < 5; ++s) CHECK(cov[s][g].value >= cov[s - 1][g].value);
            CHECK(cov[5][g].value >= cov[0][g].value);
        }
    }

    TEST_CASE("coverage and rate estimators") {
        std::vector<SirSample> s(1000);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = {1.0, 1.0, static_cast<double>(i % 4)};
        const auto cov = coverage_from_samples(s, {0.5, 2.5, 1e-12});
        CHECK(cov[0].value == 0.75);
        CHECK(cov[0].std_err == doctest::Approx(std::sqrt(0.75 * 0.25 / 1000)));
        CHECK(cov[1].value == 0.25);
        CHECK(cov[2].value == 0.75);
        const MetricEstimate r = rate_from_samples(s);
        CHECK(r.value == doctest::Approx((std::log(2.0) + std::log(3.0) + std::log(4.0)) / 4.0).epsilon(1e-14));
        std::vector<SirSample> zero(10, SirSample{0.0, 1.0, 0.0});
        CHECK(rate_from_samples(zero).value == 0.0);
        CHECK(rate_from_samples(zero).std_err == 0.0);
    }

    TEST_CASE("tiny threshold gives full coverage") {
        McConfig cfg = small_config(500);
        cfg.gamma_grid = {1e-9};
        CHECK(estimate_coverage(cfg)[0].value == 1.0);
    }

    TEST_CASE("standard error halves with four times the trials") {
        McConfig cfg = small_config(4000);
        const double a = estimate_rate(cfg).std_err;
        cfg.trials = 16000;
        const double b = estimate_rate(cfg).std_err;
        CHECK(a / b == doctest::Approx(2.0).epsilon(0.1));
    }

    TEST_CASE("histogram of uniform samples is flat and normalised") {
        Engine rng(4);
        std::uniform_real_distribution<double> u(2.0, 5.0);
        std::vector<double> x(200000);
        for (double& v : x) v = u(rng);
        const Histogram h = empirical_pdf(x, BinSpec{20, 2.0, 5.0, false});
        for (Eigen::Index i = 0; i < h.density.size(); ++i) CHECK(h.density(i) * 3.0 == doctest::Approx(1.0).epsilon(0.05));
        const double total = (h.density.array() * (h.edges.tail(20) - h.edges.head(20)).array()).sum();
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(h.outside == 0);
        const Histogram part = empirical_pdf(x, BinSpec{10, 2.0, 3.5, true});
        CHECK(part.outside > 0);
        const Histogram flat = empirical_pdf(std::vector<double>(5, 7.0), BinSpec{});
        CHECK(flat.density.size() == 1);
        CHECK(flat.edges(0) == 6.5);
        CHECK_THROWS_AS(empirical_pdf({1.0}, BinSpec{}), DomainError);
    }

    TEST_CASE("sup CDF distance matches a Kolmogorov bound") {
        Engine rng(10);
        std::exponential_distribution<double> e(2.0);
        std::vector<double> x(20000);
        for (double& v : x) v = e(rng);
        const boost::math::exponential_distribution<double> law(2.0);
        auto cdf = [&](double t) { return boost::math::cdf(law, t); };
        const double d = sup_cdf_distance(x, cdf);
        CHECK(d < 1.63 / std::sqrt(20000.0));  // 1% critical value
        CHECK(sup_cdf_distance(x, cdf, 2000) <= d);
        CHECK(sup_cdf_distance(x, cdf, 2000) > d - 1.0 / 1999.0);
        auto shifted = [&](double t) { return boost::math::cdf(law, std::max(t - 0.1, 0.0)); };
        CHECK(sup_cdf_distance(x, shifted) > 0.15);
        CHECK(sup_cdf_distance({0.5}, [](double t) { return t; }) == 0.5);
    }

    TEST_CASE("config validation") {
        McConfig cfg = small_config(10);
        cfg.gamma_grid = {1.0, 0.5};
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg = small_config(0);
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg = small_config(10);
        cfg.margin = 0.9;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }
}
