#include "uavcomp/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "uavcomp/error.hpp"
#include "uavcomp/quadrature.hpp"
#include "uavcomp/specialfn.hpp"

namespace uavcomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

QuadratureSpec tight(double rel = 1e-11) {
    QuadratureSpec s;
    s.abs_tol = 0.0;
    s.rel_tol = rel;
    s.max_subdivisions = 3000;
    return s;
}

// Integral over [0, inf) of a unimodal integrand: finite panel up to the peak,
// mapped tail beyond it.
template <class F>
Estimate peak_split(F&& f, double peak, double width, const QuadratureSpec& spec) {
    Estimate e;
    QuadratureResult lo{}, hi{};
    if (peak > 0.0) lo = integrate(f, Interval{0.0, peak}, spec);
    hi = integrate(f, Interval{std::max(peak, 0.0), kInf, std::max(width, 1e-12)}, spec);
    e.value = lo.value + hi.value;
    e.error = lo.err_est + hi.err_est;
    e.converged = (peak <= 0.0 || lo.converged) && hi.converged;
    return e;
}

// Average of g(h) under the height law.
template <class G>
double height_average(const HeightLaw& law, G&& g, bool* ok = nullptr) {
    if (law.degenerate()) return g(law.h_min);
    QuadratureResult r = integrate(g, Interval{law.h_min, law.h_max}, tight(1e-12));
    if (ok && !r.converged) *ok = false;
    return r.value / (law.h_max - law.h_min);
}

double height_pdf(const HeightLaw& law, double h) {
    if (law.degenerate()) return 0.0;
    return (h >= law.h_min && h <= law.h_max) ? 1.0 / (law.h_max - law.h_min) : 0.0;
}

}  // namespace

GammaApprox match_moments(double mean, double variance) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw NumericError("match_moments: mean must be positive");
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw NumericError("match_moments: variance must be positive (degenerate or out-of-model law)");
    return {mean * mean / variance, variance / mean};
}

void validate(const NetworkParams& p) {
    if (!(p.density > 0.0) || !std::isfinite(p.density)) throw ConfigError("density", "must be positive");
    if (!(p.alpha >= 2.0) || !std::isfinite(p.alpha)) throw ConfigError("alpha", "must be at least 2");
    if (p.serving_count < 1) throw ConfigError("serving_count", "must be at least 1");
    if (!(p.field_radius > 0.0)) throw ConfigError("field_radius", "must be positive");
    validate(p.fading);
    validate(p.heights, HeightLimits{0.0, kInf});
}

double nearest_distance_pdf(int n, const NetworkParams& p, double r) {
    if (n < 1) throw DomainError("nearest_distance_pdf: rank must be >= 1");
    if (r < 0.0) throw DomainError("nearest_distance_pdf: r must be non-negative");
    if (r == 0.0) return 0.0;
    const double lp = p.density * kPi;
    const double u = lp * r * r;
    return 2.0 * std::exp(n * std::log(u) - u - log_gamma(n)) / r;
}

double serving_distance_pdf(int n, const NetworkParams& p, double x) {
    if (n < 1) throw DomainError("serving_distance_pdf: rank must be >= 1");
    if (x <= p.heights.h_min) return 0.0;
    const double lp = p.density * kPi;
    // x * 2 (lp)^n / Gamma(n) * (x^2 - h^2)^{n-1} exp(-lp (x^2 - h^2)) per height
    auto kernel = [&](double h) {
        const double s = x * x - h * h;
        if (s <= 0.0) return 0.0;
        return 2.0 * x * lp * std::exp((n - 1) * std::log(lp * s) - lp * s - log_gamma(n));
    };
    if (p.heights.degenerate()) return kernel(p.heights.h_min);
    const double hi = std::min(x, p.heights.h_max);
    QuadratureResult r = integrate(kernel, Interval{p.heights.h_min, hi}, tight(1e-12));
    return r.value * height_pdf(p.heights, p.heights.h_min);
}

Estimate moment_d_neg(int n, double exponent, const NetworkParams& p) {
    if (n < 1) throw DomainError("moment_d_neg: rank must be >= 1");
    if (!(exponent > 0.0)) throw DomainError("moment_d_neg: exponent must be positive");
    const double lp = p.density * kPi;
    const double lg = log_gamma(n);
    bool ok = true;
    double worst_err = 0.0;
    // u = lp r^2 turns the ranked-distance law into Gamma(n, 1).
    auto given_h = [&](double h) {
        auto f = [&](double u) {
            const double base = (n > 1 ? (n - 1) * std::log(u) : 0.0) - u - lg;
            return std::exp(base - 0.5 * exponent * std::log(u / lp + h * h));
        };
        Estimate e = peak_split(f, std::max(n - 1.0, 0.0), std::sqrt(static_cast<double>(n)) + 1.0, tight(1e-12));
        if (!e.converged) ok = false;
        worst_err = std::max(worst_err, e.error);
        return e.value;
    };
    Estimate out;
    out.value = height_average(p.heights, given_h, &ok);
    out.error = worst_err;
    out.converged = ok;
    return out;
}

namespace {

struct RankMoments {
    double sum_half = 0.0;     // sum_i E[d_i^{-alpha/2}]
    double sum_half_sq = 0.0;  // sum_i E[d_i^{-alpha/2}]^2
    double sum_full = 0.0;     // sum_i E[d_i^{-alpha}]
};

RankMoments rank_moments(const NetworkParams& p) {
    RankMoments r;
    for (int i = 1; i <= p.serving_count; ++i) {
        const double mh = moment_d_neg(i, 0.5 * p.alpha, p).value;
        r.sum_half += mh;
        r.sum_half_sq += mh * mh;
        r.sum_full += moment_d_neg(i, p.alpha, p).value;
    }
    return r;
}

double cross_moment(const FadingParams& f, SignalModel model) {
    const double ea = f.mean_amplitude();
    return model == SignalModel::corrected ? ea * ea : f.omega;
}

}  // namespace

GammaApprox lemma1_params(const NetworkParams& p, SignalModel model) {
    validate(p);
    const RankMoments r = rank_moments(p);
    const double ea = p.fading.mean_amplitude();
    const double mean = ea * r.sum_half;
    const double second =
        p.fading.omega * r.sum_full + cross_moment(p.fading, model) * (r.sum_half * r.sum_half - r.sum_half_sq);
    return match_moments(mean, second - mean * mean);
}

GammaApprox lemma1_closed_form(const NetworkParams& p, SignalModel model) {
    validate(p);
    const RankMoments r = rank_moments(p);
    const double m = p.fading.m;
    const double omega = p.fading.omega;
    const double ratio = std::exp(log_gamma(m) - log_gamma(m + 0.5));  // Gamma(m)/Gamma(m+1/2)
    const double pairs = r.sum_half * r.sum_half - r.sum_half_sq;
    // Bracket of the shape denominator, expressed in units of (E|h|)^2.
    double bracket;
    if (model == SignalModel::omega_cross_term)
        bracket = m * ratio * ratio * (r.sum_full + pairs);
    else
        bracket = m * ratio * ratio * r.sum_full + pairs;
    const double shape = r.sum_half * r.sum_half / (bracket - r.sum_half * r.sum_half);
    // Scale: (m Omega)^{1/2} Gamma(m) / (Gamma(m+1/2) sum) * bracket' - E|h| sum
    const double ea = std::sqrt(omega / m) / ratio;
    double bracket_scale;
    if (model == SignalModel::omega_cross_term)
        bracket_scale = r.sum_full + pairs;
    else
        bracket_scale = r.sum_full + pairs / (m * ratio * ratio);
    const double scale = std::sqrt(m * omega) * ratio / r.sum_half * bracket_scale - ea * r.sum_half;
    if (!(shape > 0.0) || !(scale > 0.0)) throw NumericError("lemma1_closed_form: non-positive parameters");
    return {shape, scale};
}

namespace {

// Integral over heights of int_r^R x (x^2 + h^2)^{-e/2} dx.
double shell_kernel(const NetworkParams& p, double e, double r, bool* ok) {
    const double R = p.field_radius;
    if (r >= R) return 0.0;
    const double k = 1.0 - 0.5 * e;
    auto g = [&](double h) {
        const double inner = std::pow(r * r + h * h, k);
        const double outer = std::isinf(R) ? 0.0 : std::pow(R * R + h * h, k);
        return (inner - outer) / (e - 2.0);
    };
    return height_average(p.heights, g, ok);
}

}  // namespace

GammaApprox lemma2_params(const NetworkParams& p, InterferenceModel model) {
    validate(p);
    if (!(p.alpha > 2.0)) throw DomainError("lemma2_params: interference diverges for alpha <= 2");
    const double lam = p.density;
    const double m = p.fading.m;
    const double omega = p.fading.omega;
    bool ok = true;
    const double c1 = 2.0 * kPi * lam * omega;
    const double c2 = 2.0 * kPi * lam * (m + 1.0) * omega * omega / m;
    if (model != InterferenceModel::beyond_serving) {
        const double k1 = shell_kernel(p, p.alpha, 0.0, &ok);
        const double k2 = shell_kernel(p, 2.0 * p.alpha, 0.0, &ok);
        if (model == InterferenceModel::full_plane) return match_moments(c1 * k1, c2 * k2);
        const double shape = 2.0 * m * m * kPi * lam * k1 * k1 / ((m + 1.0) * omega * k2);
        const double scale = (m + 1.0) * omega * k2 / (m * k1);
        return {shape, scale};
    }
    // Condition on the serving_count-th horizontal distance r_s; given r_s the
    // interferers form a PPP outside the disk of that radius.
    const int s = p.serving_count;
    const double lp = lam * kPi;
    const double lg = log_gamma(s);
    auto weight = [&](double u) { return std::exp((s - 1) * std::log(u) - u - lg); };
    auto mean_given = [&](double u) { return c1 * shell_kernel(p, p.alpha, std::sqrt(u / lp), &ok); };
    auto var_given = [&](double u) { return c2 * shell_kernel(p, 2.0 * p.alpha, std::sqrt(u / lp), &ok); };
    const double peak = std::max(s - 1.0, 0.0);
    const double width = std::sqrt(static_cast<double>(s)) + 1.0;
    const QuadratureSpec spec = tight(1e-10);
    auto e1 = peak_split([&](double u) { return u > 0.0 ? weight(u) * mean_given(u) : 0.0; }, peak, width, spec);
    auto e2 = peak_split(
        [&](double u) {
            if (u <= 0.0) return 0.0;
            const double mu = mean_given(u);
            return weight(u) * (var_given(u) + mu * mu);
        },
        peak, width, spec);
    if (!e1.converged || !e2.converged || !ok) throw NumericError("lemma2_params: quadrature did not converge");
    return match_moments(e1.value, e2.value - e1.value * e1.value);
}

double signal_ccdf(const GammaApprox& sig, double x) {
    if (x < 0.0) throw DomainError("signal_ccdf: x must be non-negative");
    return gamma_q(sig.shape, std::sqrt(x) / sig.scale);
}

double signal_cdf(const GammaApprox& sig, double x) {
    if (x < 0.0) throw DomainError("signal_cdf: x must be non-negative");
    return gamma_p(sig.shape, std::sqrt(x) / sig.scale);
}

double signal_pdf(const GammaApprox& sig, double x) {
    if (x <= 0.0) return 0.0;
    const double nu = sig.shape;
    const double sx = std::sqrt(x);
    return std::exp(0.5 * (nu - 2.0) * std::log(x) - nu * std::log(sig.scale) - log_gamma(nu) - sx / sig.scale) / 2.0;
}

double interference_cdf(const GammaApprox& intf, double x) {
    if (x < 0.0) throw DomainError("interference_cdf: x must be non-negative");
    return gamma_p(intf.shape, x / intf.scale);
}

double interference_pdf(const GammaApprox& intf, double x) {
    if (x <= 0.0) return 0.0;
    const double k = intf.shape;
    return std::exp((k - 1.0) * std::log(x) - k * std::log(intf.scale) - log_gamma(k) - x / intf.scale);
}

// With t = T/theta ~ Gamma(nu, 1) and v = I/theta' ~ Gamma(nu', 1) the SIR is
// kappa * w, w = t^2 / v, kappa = theta^2 / theta'. Everything below works in w.
namespace {

struct Normalized {
    double nu, nup, kappa, q;
    double log_norm;  // -ln 2 - lnGamma(nu) - lnGamma(nu')
};

Normalized normalize(const GammaApprox& sig, const GammaApprox& intf) {
    if (!(sig.shape > 0.0 && sig.scale > 0.0 && intf.shape > 0.0 && intf.scale > 0.0))
        throw DomainError("SIR law: Gamma parameters must be positive");
    Normalized n;
    n.nu = sig.shape;
    n.nup = intf.shape;
    n.kappa = sig.scale * sig.scale / intf.scale;
    n.q = n.nu + 2.0 * n.nup;
    n.log_norm = -std::log(2.0) - log_gamma(n.nu) - log_gamma(n.nup);
    return n;
}

double w_pdf(const Normalized& n, double w, bool* ok) {
    if (w <= 0.0) return 0.0;
    const double a = 0.5 * n.q - 1.0;
    const double sw = std::sqrt(w);
    auto inner = [&](double v) {
        if (v <= 0.0) return 0.0;
        return std::exp(a * std::log(v) - sw * std::sqrt(v) - v + n.log_norm + (0.5 * n.nu - 1.0) * std::log(w));
    };
    // Width from the curvature at the mode; the mass shrinks like 1/w once w is large.
    double peak = 0.0, width = 1.0 / (1.0 + w);
    if (a > 0.0) {
        // Root of s^2 + (sw/2) s - a, written without cancellation for large w.
        const double s = 2.0 * a / (0.5 * sw + std::sqrt(0.25 * w + 4.0 * a));
        peak = s * s;
        width = peak * std::sqrt(2.0 / (a + peak));
    }
    Estimate e = peak_split(inner, peak, width, tight(1e-11));
    if (ok && !e.converged) *ok = false;
    return e.value;
}

double w_scale(const Normalized& n) { return n.nu * (n.nu + 1.0) / std::max(n.nup - 1.0, 1.0); }

}  // namespace

double sir_pdf(const GammaApprox& sig, const GammaApprox& intf, double z) {
    if (z < 0.0) throw DomainError("sir_pdf: z must be non-negative");
    const Normalized n = normalize(sig, intf);
    return w_pdf(n, z / n.kappa, nullptr) / n.kappa;
}

Estimate sir_ccdf_from_pdf(const GammaApprox& sig, const GammaApprox& intf, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("sir_ccdf_from_pdf: gamma must be non-negative");
    const Normalized n = normalize(sig, intf);
    bool ok = true;
    auto f = [&](double w) { return w_pdf(n, w, &ok); };
    const double w0 = gamma / n.kappa;
    const double ws = w_scale(n);
    QuadratureSpec spec = tight(1e-9);
    spec.abs_tol = 1e-12;
    Estimate out;
    if (w0 < ws) {
        QuadratureResult a = integrate(f, Interval{w0, ws}, spec);
        QuadratureResult b = integrate(f, Interval{ws, kInf, ws}, spec);
        out.value = a.value + b.value;
        out.error = a.err_est + b.err_est;
        out.converged = a.converged && b.converged && ok;
    } else {
        QuadratureResult b = integrate(f, Interval{w0, kInf, std::max(ws, w0)}, spec);
        out.value = b.value;
        out.error = b.err_est;
        out.converged = b.converged && ok;
    }
    return out;
}

Estimate coverage_probability(const GammaApprox& sig, const GammaApprox& intf, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("coverage_probability: threshold must be positive");
    const double nu = sig.shape, nup = intf.shape;
    const double c = std::sqrt(gamma * intf.scale) / sig.scale;
    const double lg = log_gamma(nup);
    auto f = [&](double v) {
        if (v <= 0.0) return 0.0;
        return std::exp((nup - 1.0) * std::log(v) - v - lg) * gamma_q(nu, c * std::sqrt(v));
    };
    QuadratureSpec spec = tight(1e-10);
    spec.abs_tol = 1e-13;
    Estimate e = peak_split(f, std::max(nup - 1.0, 0.0), std::sqrt(nup) + 1.0, spec);
    e.value = std::clamp(e.value, 0.0, 1.0);
    return e;
}

Estimate coverage_probability(double gamma, const NetworkParams& p) {
    return coverage_probability(lemma1_params(p), lemma2_params(p), gamma);
}

Estimate ergodic_rate(const GammaApprox& sig, const GammaApprox& intf, RateForm form) {
    const Normalized n = normalize(sig, intf);
    bool ok = true;
    std::function<double(double)> density;
    if (form == RateForm::direct) {
        density = [&](double w) { return w_pdf(n, w, &ok); };
    } else {
        if (!(n.q > 0.0) || !(intf.scale > 0.0))
            throw ConditionError("ergodic_rate: needs nu + 2 nu' > 0 and theta' > 0");
        // f_W(w) = Gamma(q) 2^{-q/2} / (Gamma(nu) Gamma(nu')) w^{nu/2-1} e^{w/8} D_{-q}(sqrt(w/2))
        const double log_c = log_gamma(n.q) - 0.5 * n.q * std::log(2.0) - log_gamma(n.nu) - log_gamma(n.nup);
        density = [&, log_c](double w) {
            if (w <= 0.0) return 0.0;
            const double d = parabolic_cylinder_d_scaled(-n.q, std::sqrt(0.5 * w));
            return std::exp(log_c + (0.5 * n.nu - 1.0) * std::log(w)) * d;
        };
    }
    auto f = [&](double w) { return w > 0.0 ? std::log1p(n.kappa * w) * density(w) : 0.0; };
    const double ws = w_scale(n);
    QuadratureSpec spec = tight(1e-10);
    spec.abs_tol = 1e-13;
    QuadratureResult a = integrate(f, Interval{0.0, ws}, spec);
    QuadratureResult b = integrate(f, Interval{ws, kInf, ws}, spec);
    Estimate out;
    out.value = a.value + b.value;
    out.error = a.err_est + b.err_est;
    out.converged = a.converged && b.converged && ok;
    return out;
}

Estimate ergodic_rate(const NetworkParams& p, RateForm form) {
    return ergodic_rate(lemma1_params(p), lemma2_params(p), form);
}

}  // namespace uavcomp
