#pragma once

#include <vector>

#include "distrl/rng.hpp"

namespace distrl {

struct AldParams {
    double mu;
    double sigma;  // > 0
    double tau;    // in (0,1)
};

struct InvGammaParams {
    double alpha;  // shape > 0
    double beta;   // scale > 0
};

// Quantile check loss: (|u| + (2*tau - 1)*u) / 2.
double check_loss(double u, double tau);

// sign convention used at piecewise-linear kinks: sign(0) = +1
inline double sign_pos(double x) { return x >= 0.0 ? 1.0 : -1.0; }

double softplus(double x);
double sigmoid(double x);

// Digamma, |error| <= 1e-10 on [1e-3, 1e6]. Throws std::domain_error for x <= 0.
double digamma(double x);

// Asymmetric Laplace log-density.
double ald_logpdf(double g, const AldParams& p);

// Expectation of ald_logpdf over sigma ~ InverseGamma(alpha, beta):
//   log tau(1-tau) - log beta + digamma(alpha) - (alpha/beta) * check_loss(g - mu, tau)
double expected_ald_loglik(double g, double mu, const InvGammaParams& ig, double tau);

// Gamma(shape, 1) sample, Marsaglia-Tsang; shape < 1 via the Gamma(shape+1) boost.
double sample_gamma(double shape, Rng& rng);

// Normalized vector of independent Gamma draws; entries must be positive.
std::vector<double> sample_dirichlet(const std::vector<double>& concentration, Rng& rng);

namespace detail {
// Derivative of digamma; only needed inside loss gradients, not part of the
// public special-function surface.
double trigamma(double x);
}  // namespace detail

}  // namespace distrl
