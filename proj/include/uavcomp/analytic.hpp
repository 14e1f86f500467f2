#pragma once

#include <limits>

#include "uavcomp/channel.hpp"
#include "uavcomp/geometry.hpp"

namespace uavcomp {

struct GammaApprox {
    double shape = 1.0;
    double scale = 1.0;
    double mean() const { return shape * scale; }
    double variance() const { return shape * scale * scale; }
};

// Moment-matched Gamma law: shape = E^2/Var, scale = Var/E.
GammaApprox match_moments(double mean, double variance);

struct NetworkParams {
    double density = 16e-6;  // UAVs per m^2
    double alpha = 2.8;
    FadingParams fading{};
    HeightLaw heights{};
    // Radius of the disk the interferers live on; infinity for the unbounded plane.
    double field_radius = std::numeric_limits<double>::infinity();
    int serving_count = 4;
};

void validate(const NetworkParams& p);

struct Estimate {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

// Horizontal distance to the n-th nearest UAV of a planar PPP.
double nearest_distance_pdf(int n, const NetworkParams& p, double r);

// 3D distance to the n-th horizontally nearest UAV, marginalised over the height law.
double serving_distance_pdf(int n, const NetworkParams& p, double x);

// E[d_n^{-exponent}] over ranked PPP distances and the height law.
Estimate moment_d_neg(int n, double exponent, const NetworkParams& p);

// How the cross term E[|h_i||h_j|], i != j, enters Var[T].
enum class SignalModel {
    corrected,        // (E|h|)^2, exact for independent fading
    omega_cross_term  // Omega, i.e. E|h|^2, which overstates Var[T]
};

// Gamma law of the coherent amplitude sum T = sum_i d_i^{-alpha/2} |h_i|; S = T^2.
GammaApprox lemma1_params(const NetworkParams& p, SignalModel model = SignalModel::corrected);

// Same parameters evaluated through the closed-form shape/scale expressions.
GammaApprox lemma1_closed_form(const NetworkParams& p, SignalModel model = SignalModel::corrected);

enum class InterferenceModel {
    beyond_serving,     // interferers are the PPP outside the serving_count-th distance
    full_plane,         // Campbell moments over the whole plane
    full_plane_m2_shape  // full plane, shape carrying an extra m/Omega factor
};

GammaApprox lemma2_params(const NetworkParams& p, InterferenceModel model = InterferenceModel::beyond_serving);

double signal_ccdf(const GammaApprox& sig, double x);
double signal_cdf(const GammaApprox& sig, double x);
double signal_pdf(const GammaApprox& sig, double x);
double interference_cdf(const GammaApprox& intf, double x);
double interference_pdf(const GammaApprox& intf, double x);

// Density of S/I with S = T^2, T ~ sig, I ~ intf independent.
double sir_pdf(const GammaApprox& sig, const GammaApprox& intf, double z);

// P(S/I > gamma) integrated directly from the SIR density.
Estimate sir_ccdf_from_pdf(const GammaApprox& sig, const GammaApprox& intf, double gamma);

// P(S/I > gamma) averaged over I with the incomplete gamma in closed form.
Estimate coverage_probability(const GammaApprox& sig, const GammaApprox& intf, double gamma);
Estimate coverage_probability(double gamma, const NetworkParams& p);

enum class RateForm {
    direct,             // nested quadrature of ln(1+z) against the SIR density
    parabolic_cylinder  // inner integral collapsed onto D_{-(nu+2nu')}
};

Estimate ergodic_rate(const GammaApprox& sig, const GammaApprox& intf, RateForm form);
Estimate ergodic_rate(const NetworkParams& p, RateForm form = RateForm::direct);

}  // namespace uavcomp
