#include "uavcomp/channel.hpp"

#include <cmath>
#include <limits>

#include "uavcomp/error.hpp"
#include "uavcomp/specialfn.hpp"

namespace uavcomp {

double FadingParams::mean_amplitude() const {
    return std::exp(log_gamma(m + 0.5) - log_gamma(m)) * std::sqrt(omega / m);
}

void validate(const FadingParams& p) {
    if (!(p.m >= 0.5) || !std::isfinite(p.m)) throw ConfigError("m", "Nakagami shape must be >= 0.5");
    if (!(p.omega > 0.0) || !std::isfinite(p.omega)) throw ConfigError("omega", "must be positive");
}

namespace {

// Gamma(m, scale) power draws. Small integer shapes use the exact
// sum-of-exponentials form, which is several times cheaper than the generic sampler.
class PowerSampler {
public:
    explicit PowerSampler(const FadingParams& p) : scale_(p.omega / p.m), generic_(p.m, p.omega / p.m) {
        if (p.m == std::floor(p.m) && p.m <= 8.0) integer_shape_ = static_cast<int>(p.m);
    }

    double operator()(Engine& rng) {
        if (integer_shape_ == 0) return generic_(rng);
        double prod = 1.0;
        for (int k = 0; k < integer_shape_; ++k) prod *= 1.0 - unit_(rng);  // (0, 1]
        return -scale_ * std::log(prod);
    }

private:
    double scale_;
    int integer_shape_ = 0;
    std::gamma_distribution<double> generic_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace

double sample_interference_power(const FadingParams& p, Engine& rng) { return PowerSampler(p)(rng); }

double sample_nakagami_amplitude(const FadingParams& p, Engine& rng) {
    return std::sqrt(sample_interference_power(p, rng));
}

FadingDraw sample_fading(const FadingParams& p, Eigen::Index n, Engine& rng) {
    FadingDraw d;
    d.amplitude.resize(n);
    d.power.resize(n);
    PowerSampler g(p);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.amplitude(i) = std::sqrt(g(rng));
        d.power(i) = g(rng);
    }
    return d;
}

SirSample assemble_sir(const Deployment& dep, std::span<const Eigen::Index> serving, const Eigen::Vector3d& ue,
                       double alpha, const FadingDraw& fading) {
    if (!(alpha > 0.0)) throw DomainError("assemble_sir: path-loss exponent must be positive");
    const Eigen::Index n = dep.size();
    if (fading.amplitude.size() != n || fading.power.size() != n)
        throw DomainError("assemble_sir: fading draw size does not match deployment");
    std::vector<char> serves(n, 0);
    for (Eigen::Index i : serving) {
        if (i < 0 || i >= n) throw DomainError("assemble_sir: serving index out of range");
        serves[i] = 1;
    }
    const double half = -0.25 * alpha;  // (d^2)^{-alpha/4} = d^{-alpha/2}
    double amp = 0.0, intf = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dx = dep.planar(i, 0) - ue.x();
        const double dy = dep.planar(i, 1) - ue.y();
        const double dz = dep.heights(i) - ue.z();
        const double d2 = dx * dx + dy * dy + dz * dz;
        const double g = std::pow(d2, half);
        if (serves[i])
            amp += g * fading.amplitude(i);
        else
            intf += g * g * fading.power(i);
    }
    SirSample s{amp * amp, intf, 0.0};
    s.sir = intf > 0.0 ? s.signal / intf : std::numeric_limits<double>::infinity();
    return s;
}

SirSample compute_sir(const Deployment& dep, const CompSet& comp, const Eigen::Vector3d& ue, double alpha,
                      const FadingParams& fading, std::uint64_t seed) {
    validate(fading);
    Engine rng = make_engine(seed, stream::fading);
    const FadingDraw draw = sample_fading(fading, dep.size(), rng);
    return assemble_sir(dep, comp.indices, ue, alpha, draw);
}

}  // namespace uavcomp
