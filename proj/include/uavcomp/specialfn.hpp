#pragma once

namespace uavcomp {

// Gamma function on the real line, including negative non-integer arguments.
// Throws DomainError at the poles (0, -1, -2, ...) and for non-finite input.
double gamma_fn(double a);

// log|Gamma(a)|, thread safe.
double log_gamma(double a);

// 1/Gamma(a); exactly zero at the poles.
double reciprocal_gamma(double a);

// Regularized incomplete gamma functions for a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper incomplete gamma Gamma(a, x) for x > 0 and any real a (x >= 0 when a > 0).
double upper_incomplete_gamma(double a, double x);

// Exponential integral E1(x), x > 0.
double expint_e1(double x);

// Confluent hypergeometric 1F1(a; b; z). Accurate to about 1e-10 relative for
// |z| <= 50; larger |z| is evaluated but carries no accuracy promise.
double kummer_1f1(double a, double b, double z);

// Parabolic cylinder function D_p(z).
double parabolic_cylinder_d(double p, double z);

// exp(z^2/4) * D_p(z), finite where D_p itself under- or overflows.
double parabolic_cylinder_d_scaled(double p, double z);

// sum_{k=0}^{n} (-1)^k C(n,k) Gamma(k + 1 - a) x^k
double poly_p(double a, int n, double x);

double binomial(int n, int k);

}  // namespace uavcomp
