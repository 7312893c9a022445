#pragma once

// Real special functions on (0, inf) and the growth-rate constants built
// from them. All Gamma ratios are formed in the log domain.

namespace vg {

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).
double beta_fn(double x, double y);

/// psi(x) = Gamma'(x) / Gamma(x) for x > 0.
double digamma(double x);

/// Limit of F(x(t)) / Mbar(t) for f in RV(beta), M in RV(theta):
///   Gamma(theta+1) Gamma((1+beta*theta)/(1-beta)) / Gamma((1+theta)/(1-beta)).
double lambda_limit(double beta, double theta);

/// Limit of F(x(t)) / (t M(t)):  B(1+theta, (1+theta*beta)/(1-beta)) / (1-beta).
/// Equals lambda_limit(beta, theta) / (1 + theta).
double growth_constant(double beta, double theta);

struct RateConstants {
    double beta = 0.0;
    double theta = 0.0;
    double lambda_limit = 1.0;
    double growth_constant = 1.0;
};

RateConstants rate_constants(double beta, double theta);

/// Throws DomainError unless beta in [0,1) and theta >= 0 (both finite).
void check_indices(double beta, double theta);

}  // namespace vg
