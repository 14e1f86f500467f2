#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "uavcomp/channel.hpp"
#include "uavcomp/error.hpp"

using namespace uavcomp;

namespace {

struct Moments {
    double mean = 0.0, var = 0.0;
};

template <typename Draw>
Moments sample_moments(int n, Draw&& draw) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = draw();
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    return {mean, s2 / n - mean * mean};
}

}  // namespace

TEST_SUITE("channel") {
    TEST_CASE("mean amplitude closed form") {
        for (double m : {0.5, 1.0, 2.0, 3.7}) {
            const FadingParams f{m, 2.5};
            const double want = boost::math::tgamma(m + 0.5) / boost::math::tgamma(m) * std::sqrt(2.5 / m);
            CHECK(f.mean_amplitude() == doctest::Approx(want).epsilon(1e-13));
        }
    }

    TEST_CASE("Nakagami moments match for integer and fractional shapes") {
        const int n = 200000;
        for (double m : {0.5, 1.0, 2.0, 2.5, 9.0}) {
            const FadingParams f{m, 1.7};
            Engine rng(77);
            const Moments amp = sample_moments(n, [&] { return sample_nakagami_amplitude(f, rng); });
            CHECK(std::abs(amp.mean - f.mean_amplitude()) < 5.0 * std::sqrt(amp.var / n));
            const Moments pow = sample_moments(n, [&] { return sample_interference_power(f, rng); });
            // Power is Gamma(m, omega/m): mean omega, variance omega^2/m.
            CHECK(std::abs(pow.mean - 1.7) < 5.0 * 1.7 / std::sqrt(m * n));
            CHECK(pow.var == doctest::Approx(1.7 * 1.7 / m).epsilon(0.05));
        }
    }

    TEST_CASE("invalid fading is rejected") {
        CHECK_THROWS_AS(validate(FadingParams{0.4, 1.0}), ConfigError);
        CHECK_THROWS_AS(validate(FadingParams{2.0, 0.0}), ConfigError);
    }

    TEST_CASE("SIR assembled by hand") {
        Deployment d;
        d.planar.resize(3, 2);
        d.planar << 30, 40, -60, 80, 0, 0;
        d.heights.resize(3);
        d.heights << 0, 0, 100;
        FadingDraw fd;
        fd.amplitude = Eigen::Vector3d(1.0, 2.0, 9.0);
        fd.power = Eigen::Vector3d(7.0, 7.0, 0.5);
        const Eigen::Index serving[] = {0, 1};
        const double alpha = 2.0;
        const SirSample s = assemble_sir(d, serving, Eigen::Vector3d::Zero(), alpha, fd);
        // Ranges 50, 100, 100.
        const double sig = std::pow(1.0 / 50.0 + 2.0 / 100.0, 2);
        const double intf = 0.5 / (100.0 * 100.0);
        CHECK(s.signal == doctest::Approx(sig).epsilon(1e-14));
        CHECK(s.interference == doctest::Approx(intf).epsilon(1e-14));
        CHECK(s.sir == doctest::Approx(sig / intf).epsilon(1e-14));
    }

    TEST_CASE("no interferers gives infinite SIR") {
        Deployment d;
        d.planar = Eigen::MatrixX2d::Zero(1, 2);
        d.heights = Eigen::VectorXd::Constant(1, 100.0);
        FadingDraw fd{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)};
        const Eigen::Index serving[] = {0};
        const SirSample s = assemble_sir(d, serving, Eigen::Vector3d::Zero(), 3.0, fd);
        CHECK(s.interference == 0.0);
        CHECK(s.sir == std::numeric_limits<double>::infinity());
    }

    TEST_CASE("compute_sir is a pure function of its seed") {
        DeploymentSpec spec;
        const Deployment d = sample_deployment(spec, 5);
        const CompSet c = select_comp_set(d, Eigen::Vector2d::Zero());
        const FadingParams f{};
        const SirSample a = compute_sir(d, c, Eigen::Vector3d::Zero(), 2.8, f, 9);
        const SirSample b = compute_sir(d, c, Eigen::Vector3d::Zero(), 2.8, f, 9);
        const SirSample other = compute_sir(d, c, Eigen::Vector3d::Zero(), 2.8, f, 10);
        CHECK(a.sir == b.sir);
        CHECK(a.sir != other.sir);
        CHECK(a.sir > 0.0);
    }
}
