#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "distrl/numerics.hpp"
#include "distrl/rng.hpp"

using namespace distrl;

namespace {

// independent long-double digamma: recurrence to x >= 50, then the
// asymptotic series through x^-14
long double digamma_oracle(long double x) {
    long double acc = 0.0L;
    while (x < 50.0L) {
        acc -= 1.0L / x;
        x += 1.0L;
    }
    const long double inv = 1.0L / x, inv2 = inv * inv;
    long double s = std::log(x) - 0.5L * inv;
    const long double c[] = {1.0L / 12, -1.0L / 120, 1.0L / 252, -1.0L / 240,
                             1.0L / 132, -691.0L / 32760, 1.0L / 12};
    long double pw = inv2;
    for (long double ci : c) {
        s -= ci * pw;
        pw *= inv2;
    }
    return acc + s;
}

double sample_inv_gamma(double alpha, double beta, Rng& rng) {
    return beta / sample_gamma(alpha, rng);
}

}  // namespace

TEST_CASE("check loss formula and shape") {
    CHECK(check_loss(0.0, 0.3) == 0.0);
    CHECK(check_loss(2.0, 0.5) == doctest::Approx(1.0));
    CHECK(check_loss(-3.0, 0.9) == doctest::Approx(0.3));
    CHECK(check_loss(3.0, 0.9) == doctest::Approx(2.7));
    // subgradient cross-check: tau * u for u > 0, (tau - 1) * u for u < 0
    for (double tau : {0.1, 0.5, 0.8})
        for (double u : {-2.5, -0.3, 0.4, 3.0}) {
            const double expected = u > 0 ? tau * u : (tau - 1.0) * u;
            CHECK(check_loss(u, tau) == doctest::Approx(expected));
        }
}

TEST_CASE("check loss is convex, nonnegative, zero only at zero") {
    const double tau = 0.35;
    for (double u = -4.0; u <= 4.0; u += 0.23) {
        CHECK(check_loss(u, tau) >= 0.0);
        if (u != 0.0) CHECK(check_loss(u, tau) > 0.0);
        const double mid = check_loss(u, tau);
        const double avg = 0.5 * (check_loss(u - 0.1, tau) + check_loss(u + 0.1, tau));
        CHECK(mid <= avg + 1e-12);
    }
}

TEST_CASE("digamma reference values") {
    CHECK(digamma(1.0) == doctest::Approx(-0.57721566490).epsilon(1e-9));
    CHECK(digamma(2.0) == doctest::Approx(digamma(1.0) + 1.0).epsilon(1e-12));
    CHECK(digamma(10.0) == doctest::Approx(2.25175258907).epsilon(1e-9));
    CHECK_THROWS_AS(digamma(0.0), std::domain_error);
    CHECK_THROWS_AS(digamma(-1.5), std::domain_error);
}

TEST_CASE("digamma matches high precision oracle on a wide grid") {
    for (double x = 1e-3; x < 1e6; x *= 1.7) {
        const double ref = static_cast<double>(digamma_oracle(static_cast<long double>(x)));
        CHECK(std::abs(digamma(x) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("digamma recurrence property") {
    for (double x = 0.1; x <= 100.0; x += 0.7) {
        const double lhs = digamma(x + 1.0) - digamma(x) - 1.0 / x;
        CHECK(std::abs(lhs) <= 1e-12 * std::max(1.0, std::abs(digamma(x))));
    }
}

TEST_CASE("trigamma recurrence and pi^2/6 value") {
    CHECK(detail::trigamma(1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-10));
    for (double x = 0.5; x <= 60.0; x += 1.3)
        CHECK(detail::trigamma(x + 1.0) - detail::trigamma(x) + 1.0 / (x * x) ==
              doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("ald logpdf closed form") {
    CHECK(ald_logpdf(0.0, {0.0, 1.0, 0.5}) == doctest::Approx(std::log(0.25)));
    CHECK(ald_logpdf(2.0, {0.0, 1.0, 0.5}) == doctest::Approx(std::log(0.25) - 1.0));
}

TEST_CASE("ald density integrates to one") {
    const AldParams p{0.0, 2.0, 0.3};
    // trapezoid over a range wide enough for exp(-0.15|g|) tails
    const double lo = -400.0, hi = 400.0, h = 0.005;
    double integral = 0.0;
    for (double g = lo; g < hi; g += h)
        integral += 0.5 * h * (std::exp(ald_logpdf(g, p)) + std::exp(ald_logpdf(g + h, p)));
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("expected ald loglik closed form") {
    const InvGammaParams ig{10.0, 10.0};
    const double at_mu = expected_ald_loglik(0.0, 0.0, ig, 0.5);
    CHECK(at_mu == doctest::Approx(std::log(0.25) - std::log(10.0) + digamma(10.0)).epsilon(1e-12));
    CHECK(at_mu == doctest::Approx(-1.4372).epsilon(1e-4));
    CHECK(expected_ald_loglik(2.0, 0.0, ig, 0.5) == doctest::Approx(at_mu - 1.0).epsilon(1e-12));
}

TEST_CASE("expected ald loglik equals inverse gamma monte carlo mean") {
    Rng rng(17);
    const InvGammaParams ig{12.0, 8.0};
    const double g = 1.5, mu = 0.0, tau = 0.3;
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double sigma = sample_inv_gamma(ig.alpha, ig.beta, rng);
        const double v = ald_logpdf(g, {mu, sigma, tau});
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(expected_ald_loglik(g, mu, ig, tau) - mean) <= 3.0 * se);
}

TEST_CASE("expected ald loglik concave in mu") {
    const InvGammaParams ig{11.0, 6.0};
    double prev_slope = 1e100;
    for (double mu = -3.0; mu <= 3.0; mu += 0.1) {
        const double slope = (expected_ald_loglik(1.0, mu + 1e-4, ig, 0.4) -
                              expected_ald_loglik(1.0, mu - 1e-4, ig, 0.4)) / 2e-4;
        CHECK(slope <= prev_slope + 1e-9);
        prev_slope = slope;
    }
}

TEST_CASE("gamma sampler moments at shape 3") {
    Rng rng(3);
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_gamma(3.0, rng);
        CHECK(x > 0.0);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    // mean of Gamma(3): sd sqrt(3/n); var estimator sd approx sqrt((m4-var^2)/n)
    CHECK(std::abs(mean - 3.0) <= 3.0 * std::sqrt(3.0 / n));
    CHECK(std::abs(var - 3.0) <= 3.0 * std::sqrt(24.0 / n));
}

TEST_CASE("gamma shape one matches exponential by ks test") {
    Rng rng(5);
    const int n = 100000;
    std::vector<double> xs(n);
    for (double& x : xs) x = sample_gamma(1.0, rng);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-xs[i]);
        d = std::max(d, std::abs(cdf - (i + 1.0) / n));
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    }
    // 1% critical value of the KS statistic
    CHECK(d * std::sqrt(static_cast<double>(n)) < 1.628);
}

TEST_CASE("dirichlet sampler moments and normalization") {
    Rng rng(7);
    const int n = 100000;
    {
        double m0 = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto v = sample_dirichlet({1.0, 1.0}, rng);
            CHECK(std::abs(v[0] + v[1] - 1.0) <= 1e-12);
            m0 += v[0];
        }
        // Beta(1,1) sd = sqrt(1/12)
        CHECK(std::abs(m0 / n - 0.5) <= 3.0 * std::sqrt(1.0 / 12.0 / n));
    }
    {
        double m0 = 0.0;
        for (int i = 0; i < n; ++i) m0 += sample_dirichlet({10.0, 30.0}, rng)[0];
        const double var = 0.25 * 0.75 / 41.0;
        CHECK(std::abs(m0 / n - 0.25) <= 3.0 * std::sqrt(var / n));
    }
    CHECK_THROWS(sample_dirichlet({1.0, 0.0}, rng));
}

TEST_CASE("softplus sigmoid sign conventions") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
    CHECK(sigmoid(0.0) == doctest::Approx(0.5));
    CHECK(sign_pos(0.0) == 1.0);
    CHECK(sign_pos(-1e-300) == -1.0);
    CHECK(softplus(800.0) == doctest::Approx(800.0));  // no overflow
    CHECK(softplus(-800.0) == doctest::Approx(0.0));
}
