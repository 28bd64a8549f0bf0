#include "distrl/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace distrl {

double check_loss(double u, double tau) {
    return (std::fabs(u) + (2.0 * tau - 1.0) * u) / 2.0;
}

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: x must be > 0");
    // upward recurrence to x >= 6, then asymptotic expansion
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})
    double series = inv2 * (1.0 / 12.0
                  - inv2 * (1.0 / 120.0
                  - inv2 * (1.0 / 252.0
                  - inv2 * (1.0 / 240.0
                  - inv2 * (1.0 / 132.0
                  - inv2 * (691.0 / 32760.0
                  - inv2 * (1.0 / 12.0
                  - inv2 * (3617.0 / 8160.0))))))));
    return acc + std::log(x) - 0.5 * inv - series;
}

namespace detail {

double trigamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("trigamma: x must be > 0");
    double acc = 0.0;
    while (x < 6.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2k}/x^{2k+1}
    double series = inv * (1.0
                  + inv * (0.5
                  + inv * (1.0 / 6.0
                  - inv2 * (1.0 / 30.0
                  - inv2 * (1.0 / 42.0
                  - inv2 * (1.0 / 30.0
                  - inv2 * (5.0 / 66.0)))))));
    return acc + series;
}

}  // namespace detail

double ald_logpdf(double g, const AldParams& p) {
    return std::log(p.tau * (1.0 - p.tau)) - std::log(p.sigma)
         - check_loss(g - p.mu, p.tau) / p.sigma;
}

double expected_ald_loglik(double g, double mu, const InvGammaParams& ig, double tau) {
    // E[log sigma] = log beta - psi(alpha), E[1/sigma] = alpha / beta
    return std::log(tau * (1.0 - tau)) - std::log(ig.beta) + digamma(ig.alpha)
         - (ig.alpha / ig.beta) * check_loss(g - mu, tau);
}

double sample_gamma(double shape, Rng& rng) {
    if (!(shape > 0.0)) throw std::domain_error("sample_gamma: shape must be > 0");
    if (shape < 1.0) {
        const double g = sample_gamma(shape + 1.0, rng);
        const double u = rng.uniform_open();
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = rng.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        const double z2 = z * z;
        if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
        if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> sample_dirichlet(const std::vector<double>& concentration, Rng& rng) {
    std::vector<double> out(concentration.size());
    double total = 0.0;
    for (std::size_t i = 0; i < concentration.size(); ++i) {
        if (!(concentration[i] > 0.0))
            throw std::invalid_argument("sample_dirichlet: nonpositive concentration entry");
        out[i] = sample_gamma(concentration[i], rng);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

}  // namespace distrl
