#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "uavcomp/analytic.hpp"
#include "uavcomp/error.hpp"
#include "uavcomp/montecarlo.hpp"

using namespace uavcomp;

namespace {

NetworkParams case_network() {
    NetworkParams p;
    p.density = 16e-6;
    p.alpha = 2.8;
    return p;
}

// Gamma(a, x) for any real a via the downward-stable recurrence from a positive argument.
double upper_gamma(double a, double x) {
    if (a > 0.0) return boost::math::tgamma(a, x);
    return (upper_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

// Fixed altitude h: with c = lambda pi h^2 and u ~ Gamma(n, 1),
// E[(u/(lambda pi) + h^2)^{-s}] = (lambda pi)^s e^c / Gamma(n) sum_k C(n-1,k) (-c)^{n-1-k} Gamma(k+1-s, c).
double fixed_height_moment(int n, double exponent, double density, double h) {
    const double lp = density * std::numbers::pi;
    const double s = 0.5 * exponent;
    const double c = lp * h * h;
    double sum = 0.0;
    for (int k = 0; k <= n - 1; ++k)
        sum += boost::math::binomial_coefficient<double>(n - 1, k) * std::pow(-c, n - 1 - k) *
               upper_gamma(k + 1.0 - s, c);
    return std::pow(lp, s) * std::exp(c) / boost::math::tgamma(static_cast<double>(n)) * sum;
}

}  // namespace

TEST_SUITE("analytic") {
    TEST_CASE("moment matching") {
        const GammaApprox g = match_moments(3.0, 1.5);
        CHECK(g.mean() == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(g.variance() == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(g.shape == doctest::Approx(6.0));
        CHECK_THROWS_AS(match_moments(1.0, 0.0), NumericError);
        CHECK_THROWS_AS(match_moments(-1.0, 1.0), NumericError);
    }

    TEST_CASE("ranked distance densities integrate to one") {
        NetworkParams p = case_network();
        boost::math::quadrature::exp_sinh<double> es;
        for (int n = 1; n <= 4; ++n) {
            const double planar = es.integrate([&](double r) { return nearest_distance_pdf(n, p, r); });
            CHECK(planar == doctest::Approx(1.0).epsilon(1e-9));
            boost::math::quadrature::tanh_sinh<double> ts;
            const double lo = ts.integrate([&](double x) { return serving_distance_pdf(n, p, x); }, 50.0, 300.0);
            const double hi = es.integrate([&](double x) { return serving_distance_pdf(n, p, x); }, 300.0,
                                           std::numeric_limits<double>::infinity());
            CHECK(lo + hi == doctest::Approx(1.0).epsilon(1e-6));
        }
    }

    TEST_CASE("negative moments at fixed altitude match the incomplete-gamma series") {
        NetworkParams p = case_network();
        for (double h : {50.0, 120.0, 300.0}) {
            p.heights = HeightLaw::fixed(h);
            for (int n = 1; n <= 4; ++n)
                for (double e : {1.2, 1.4, 2.8, 3.2}) {
                    const Estimate got = moment_d_neg(n, e, p);
                    CHECK(got.converged);
                    CHECK(got.value == doctest::Approx(fixed_height_moment(n, e, p.density, h)).epsilon(1e-9));
                }
        }
    }

    TEST_CASE("uniform altitude moment is the average of fixed-altitude moments") {
        NetworkParams p = case_network();
        boost::math::quadrature::tanh_sinh<double> ts;
        const double want =
            ts.integrate([&](double h) { return fixed_height_moment(2, 2.8, p.density, h); }, 50.0, 300.0) / 250.0;
        CHECK(moment_d_neg(2, 2.8, p).value == doctest::Approx(want).epsilon(1e-8));
    }

    TEST_CASE("signal Gamma law carries the exact first two moments") {
        NetworkParams p = case_network();
        for (SignalModel model : {SignalModel::corrected, SignalModel::omega_cross_term}) {
            const GammaApprox g = lemma1_params(p, model);
            const GammaApprox c = lemma1_closed_form(p, model);
            CHECK(c.shape == doctest::Approx(g.shape).epsilon(1e-10));
            CHECK(c.scale == doctest::Approx(g.scale).epsilon(1e-10));
        }
        // Mean of T by hand.
        double sum_half = 0.0;
        for (int i = 1; i <= 4; ++i) sum_half += moment_d_neg(i, 1.4, p).value;
        CHECK(lemma1_params(p).mean() == doctest::Approx(p.fading.mean_amplitude() * sum_half).epsilon(1e-12));
        // The Omega cross term can only inflate the variance.
        CHECK(lemma1_params(p, SignalModel::omega_cross_term).variance() > lemma1_params(p).variance());
    }

    TEST_CASE("signal and interference laws agree with simulation in mean") {
        McConfig cfg;
        cfg.trials = 20000;
        cfg.network = case_network();
        cfg.network.field_radius = cfg.region_radius * cfg.margin;
        const BatchResult b = run_batch(cfg, {Scheme::proposed()}, {2.8});
        const auto s = extract(b.at(0, 0), &SirSample::signal);
        const auto i = extract(b.at(0, 0), &SirSample::interference);
        auto mean_se = [](const std::vector<double>& x) {
            double m = 0.0, v = 0.0;
            for (double y : x) m += y;
            m /= x.size();
            for (double y : x) v += (y - m) * (y - m);
            return std::pair{m, std::sqrt(v / (x.size() - 1) / x.size())};
        };
        // E[T] is exact; the second moment treats ranked distances as uncorrelated.
        std::vector<double> t(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) t[k] = std::sqrt(s[k]);
        const auto [mt, set] = mean_se(t);
        CHECK(std::abs(mt - lemma1_params(cfg.network).mean()) < 5.0 * set);
        const GammaApprox intf = lemma2_params(cfg.network);
        const auto [mi, sei] = mean_se(i);
        CHECK(std::abs(mi - intf.mean()) < 5.0 * sei);
    }

    TEST_CASE("interference needs alpha above 2") {
        NetworkParams p = case_network();
        p.alpha = 2.0;
        CHECK_THROWS_AS(lemma2_params(p), DomainError);
        p.alpha = 1.5;
        CHECK_THROWS_AS(validate(p), ConfigError);
    }

    TEST_CASE("SIR density integrates to one and matches both coverage forms") {
        const GammaApprox sig{3.2, 1.1e-4}, intf{2.4, 2.0e-9};
        boost::math::quadrature::tanh_sinh<double> ts;
        boost::math::quadrature::exp_sinh<double> es;
        auto f = [&](double z) { return sir_pdf(sig, intf, z); };
        const double total = ts.integrate(f, 0.0, 4.0) + es.integrate(f, 4.0, std::numeric_limits<double>::infinity());
        CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
        for (double g : {0.1, 1.0, 3.0, 10.0, 30.0}) {
            const Estimate a = coverage_probability(sig, intf, g);
            const Estimate b = sir_ccdf_from_pdf(sig, intf, g);
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-7));
            CHECK(a.value >= 0.0);
            CHECK(a.value <= 1.0);
        }
        CHECK(coverage_probability(sig, intf, 1e-9).value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK_THROWS_AS(coverage_probability(sig, intf, 0.0), DomainError);
    }

    TEST_CASE("coverage is the survival of a Monte-Carlo draw from the two Gamma laws") {
        const GammaApprox sig{2.0, 1.0}, intf{3.0, 0.5};
        Engine rng(3);
        std::gamma_distribution<double> t(sig.shape, sig.scale), v(intf.shape, intf.scale);
        const int n = 400000;
        int hits = 0;
        for (int k = 0; k < n; ++k) {
            const double tt = t(rng);
            hits += tt * tt / v(rng) > 2.0;
        }
        const double p = static_cast<double>(hits) / n;
        CHECK(std::abs(coverage_probability(sig, intf, 2.0).value - p) < 5.0 * std::sqrt(p * (1 - p) / n));
    }

    TEST_CASE("direct and parabolic-cylinder rates coincide") {
        for (double nu : {0.7, 2.0, 5.5})
            for (double nup : {0.8, 3.0, 12.0}) {
                const GammaApprox sig{nu, 0.3}, intf{nup, 0.05};
                const Estimate d = ergodic_rate(sig, intf, RateForm::direct);
                const Estimate c = ergodic_rate(sig, intf, RateForm::parabolic_cylinder);
                CHECK(d.converged);
                CHECK(c.value == doctest::Approx(d.value).epsilon(1e-8));
            }
        const NetworkParams p = case_network();
        CHECK(ergodic_rate(p, RateForm::parabolic_cylinder).value ==
              doctest::Approx(ergodic_rate(p, RateForm::direct).value).epsilon(1e-6));
        CHECK_THROWS_AS(ergodic_rate(GammaApprox{-1.0, 1.0}, GammaApprox{1.0, 1.0}, RateForm::direct), DomainError);
    }

    TEST_CASE("rate equals E[ln(1 + S/I)] under the Gamma laws") {
        const GammaApprox sig{2.5, 0.8}, intf{4.0, 0.3};
        Engine rng(8);
        std::gamma_distribution<double> t(sig.shape, sig.scale), v(intf.shape, intf.scale);
        const int n = 400000;
        double s = 0.0, s2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double tt = t(rng);
            const double r = std::log1p(tt * tt / v(rng));
            s += r;
            s2 += r * r;
        }
        const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
        CHECK(std::abs(ergodic_rate(sig, intf, RateForm::direct).value - mean) < 5.0 * se);
    }
}
