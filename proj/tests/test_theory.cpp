#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "distrl/agents.hpp"
#include "distrl/envs.hpp"
#include "distrl/theory.hpp"
#include "distrl/verify.hpp"

using namespace distrl;

namespace {

TabularMDP deterministic_chain(int n, double reward, double gamma) {
    TabularMDP mdp;
    mdp.num_states = n;
    mdp.num_actions = 1;
    mdp.transitions.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int s = 0; s < n; ++s) mdp.row(s, 0)[(s + 1) % n] = 1.0;
    mdp.reward.assign(n, reward);
    mdp.gamma = gamma;
    return mdp;
}

EmpiricalReturnDist dist_of(std::vector<double> atoms) {
    return EmpiricalReturnDist::from_samples(std::move(atoms));
}

}  // namespace

TEST_CASE("wasserstein on sorted atoms") {
    CHECK(wasserstein_p(dist_of({2.0}), dist_of({5.5}), 1.0) == doctest::Approx(3.5));
    CHECK(wasserstein_p(dist_of({0.0, 1.0}), dist_of({1.0, 0.0}), 1.0) == 0.0);
    CHECK(wasserstein_p(dist_of({0.0, 0.0}), dist_of({1.0, 3.0}), 2.0) ==
          doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("wasserstein metric properties and p monotonicity") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> xs(16), ys(16), zs(16);
        for (int i = 0; i < 16; ++i) {
            xs[i] = rng.normal();
            ys[i] = rng.normal() * 2 + 1;
            zs[i] = rng.normal() - 0.5;
        }
        const auto a = dist_of(xs), b = dist_of(ys), c = dist_of(zs);
        for (double p : {1.0, 2.0}) {
            CHECK(wasserstein_p(a, b, p) == wasserstein_p(b, a, p));
            CHECK(wasserstein_p(a, a, p) == 0.0);
            CHECK(wasserstein_p(a, b, p) <=
                  wasserstein_p(a, c, p) + wasserstein_p(c, b, p) + 1e-12);
        }
        CHECK(wasserstein_p(a, b, 1.0) <= wasserstein_p(a, b, 2.0) + 1e-12);
    }
}

TEST_CASE("discrete wasserstein with shared coordinates") {
    const std::vector<double> coords = {0.0, 1.0, 3.0};
    CHECK(discrete_wasserstein_p(coords, {1, 0, 0}, {0, 0, 1}, 1.0) == doctest::Approx(3.0));
    CHECK(discrete_wasserstein_p(coords, {0.5, 0.5, 0}, {0.5, 0.5, 0}, 2.0) == 0.0);
    CHECK(discrete_wasserstein_p(coords, {0.5, 0.5, 0}, {0, 0.5, 0.5}, 1.0) ==
          doctest::Approx(0.5 * 1.0 + 0.5 * 2.0));
}

TEST_CASE("truncation horizon bound") {
    const int T = truncation_horizon(0.9, 1.0, 1e-6);
    CHECK(std::pow(0.9, T) / (1.0 - 0.9) <= 1e-6);
    CHECK(std::pow(0.9, T - 1) / (1.0 - 0.9) > 1e-6);
}

TEST_CASE("return distribution on degenerate chains") {
    Rng rng(5);
    {
        const auto mdp = deterministic_chain(3, 0.25, 0.9);
        const auto d = return_distribution(mdp, GreedyPolicy{{0, 0, 0}}, 0, 0,
                                           truncation_horizon(0.9, 0.25), 64, rng);
        for (double a : d.atoms) CHECK(a == doctest::Approx(2.5).epsilon(1e-5));
    }
    {
        const auto mdp = deterministic_chain(3, 0.0, 0.9);
        const auto d = return_distribution(mdp, GreedyPolicy{{0, 0, 0}}, 0, 0, 50, 64, rng);
        for (double a : d.atoms) CHECK(a == 0.0);
    }
    {
        // i.i.d. coin: gamma=0, the return is the first arrival reward
        TabularMDP coin;
        coin.num_states = 2;
        coin.num_actions = 1;
        coin.transitions = {0.5, 0.5, 0.5, 0.5};
        coin.reward = {0.0, 1.0};
        coin.gamma = 0.0;
        const auto d = return_distribution(coin, GreedyPolicy{{0, 0}}, 0, 0, 1, 40000, rng);
        CHECK(std::abs(d.mean() - 0.5) <= 3.0 * 0.5 / std::sqrt(40000.0));
        for (double a : d.atoms) CHECK((a == 0.0 || a == 1.0));
    }
}

TEST_CASE("bellman backup base cases") {
    Rng rng(7);
    const auto mdp = deterministic_chain(3, 0.25, 0.9);
    ReturnTable eta(3, std::vector<EmpiricalReturnDist>(1));
    for (int s = 0; s < 3; ++s) eta[s][0] = dist_of(std::vector<double>(8, 2.0));
    const GreedyPolicy pi{{0, 0, 0}};
    {
        // gamma = 0 with deterministic transitions: point mass at the arrival reward
        TabularMDP zero = mdp;
        zero.gamma = 0.0;
        const auto d = bellman_backup(eta, zero, pi, 0, 0, rng);
        for (double a : d.atoms) CHECK(a == doctest::Approx(0.25));
    }
    {
        // deterministic transition, point-mass eta at v: delta at r + gamma v
        const auto d = bellman_backup(eta, mdp, pi, 0, 0, rng);
        for (double a : d.atoms) CHECK(a == doctest::Approx(0.25 + 0.9 * 2.0));
    }
    {
        // half/half mixture of point masses 0 and 1, zero reward, gamma 0.9
        TabularMDP mix;
        mix.num_states = 2;
        mix.num_actions = 1;
        mix.transitions = {0.5, 0.5, 0.5, 0.5};
        mix.reward = {0.0, 0.0};
        mix.gamma = 0.9;
        ReturnTable eta2(2, std::vector<EmpiricalReturnDist>(1));
        eta2[0][0] = dist_of(std::vector<double>(16, 0.0));
        eta2[1][0] = dist_of(std::vector<double>(16, 1.0));
        const int m = 20000;
        ReturnTable big(2, std::vector<EmpiricalReturnDist>(1));
        big[0][0] = dist_of(std::vector<double>(m, 0.0));
        big[1][0] = dist_of(std::vector<double>(m, 1.0));
        const auto d = bellman_backup(big, mix, GreedyPolicy{{0, 0}}, 0, 0, rng);
        int high = 0;
        for (double a : d.atoms) {
            CHECK((a == doctest::Approx(0.0) || a == doctest::Approx(0.9)));
            if (a > 0.45) ++high;
        }
        CHECK(std::abs(high - m / 2.0) <= 3.0 * std::sqrt(0.25 * m));
    }
}

TEST_CASE("one step contraction certificate special cases") {
    Rng rng(11);
    const auto star = random_mdp(4, 2, 0.9, rng);
    const auto pk = random_mdp(4, 2, 0.9, rng);
    const auto pi = random_policy(4, 2, rng);
    {
        // identical kernels: common random numbers give exactly zero
        auto cert = check_lemma1(star, pk, pk, pi, 1.0, 0.9, 500, rng);
        CHECK(cert.lhs == 0.0);
        CHECK(cert.rhs == 0.0);
        CHECK(cert.pass);
    }
    {
        // gamma = 0: the backup depends on the kernels only through shared draws
        const auto pbk = random_mdp(4, 2, 0.9, rng);
        auto cert = check_lemma1(star, pk, pbk, pi, 1.0, 1e-12, 500, rng);
        CHECK(cert.lhs <= 1e-10);
        CHECK(cert.pass);
    }
}

TEST_CASE("kernel lipschitz constants") {
    {
        FiniteKernel k;
        k.coords = {0.0, 1.0, 2.0};
        k.target_coords = {0.0, 1.0};
        k.rows = {{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}};
        CHECK(lipschitz_constant(k, 1.0) == 0.0);
    }
    {
        FiniteKernel k;
        k.coords = {1.0, 2.0, 3.0};
        k.target_coords = {1.0, 2.0, 3.0};
        k.rows = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        CHECK(lipschitz_constant(k, 1.0) == doctest::Approx(1.0));
        CHECK(lipschitz_constant(k, 2.0) == doctest::Approx(1.0));
    }
    {
        FiniteKernel k;
        k.coords = {0.0, 1.0};
        k.target_coords = {0.0, 3.0};
        k.rows = {{1, 0}, {0, 1}};
        CHECK(lipschitz_constant(k, 1.0) == doctest::Approx(3.0));
    }
}

TEST_CASE("composite lipschitz certificate special cases") {
    FiniteKernel k;
    k.coords = {0.0, 1.0, 2.0};
    k.target_coords = {0.0, 2.0, 5.0};
    k.rows = {{0.6, 0.4, 0.0}, {0.1, 0.8, 0.1}, {0.0, 0.3, 0.7}};
    {
        CoordinateMap f{{0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}};
        const auto cert = check_lemma2(f, k, 1.0);
        CHECK(cert.pass);
        CHECK(cert.lhs == doctest::Approx(cert.rhs).epsilon(1e-12));
    }
    {
        CoordinateMap f{{0.0, 0.5, 1.0, 7.0}, {1.0, 1.0, 1.0, 1.0}};
        const auto cert = check_lemma2(f, k, 1.0);
        CHECK(cert.pass);
        CHECK(cert.lhs == 0.0);
    }
}

TEST_CASE("autoencoded contraction with a constant decoder collapses") {
    Rng rng(13);
    const auto star = random_mdp(4, 2, 0.9, rng);
    const auto pk = random_mdp(4, 2, 0.9, rng);
    const auto pbk = random_mdp(4, 2, 0.9, rng);
    const auto pi = random_policy(4, 2, rng);
    EncoderDecoderPair pair;
    pair.state_coords = {0.0, 1.0, 2.0, 3.0};
    pair.encoder = {0.0, 1.0, 2.0, 3.0};
    pair.decoder.coords = {0.0, 1.0, 2.0, 3.0};
    pair.decoder.target_coords = pair.state_coords;
    // every latent decodes to state 0: L_D = 0
    pair.decoder.rows.assign(4, {1.0, 0.0, 0.0, 0.0});
    const auto cert = check_theorem1(star, pk, pbk, pair, pi, 1.0, 0.9, 2000, rng);
    CHECK(cert.rhs == 0.0);
    CHECK(cert.lhs <= cert.slack);
    CHECK(cert.pass);
}

TEST_CASE("repeated backups converge to the exact values") {
    Rng rng(17);
    const auto mdp = random_mdp(3, 2, 0.9, rng);
    const auto pi = random_policy(3, 2, rng);
    const int m = 20000;

    ReturnTable eta(3, std::vector<EmpiricalReturnDist>(2));
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) {
            std::vector<double> atoms(m);
            for (double& x : atoms) x = rng.uniform() * 10.0;
            eta[s][a] = dist_of(std::move(atoms));
        }
    const double slack = monte_carlo_slack(0.9, 1.0, m);
    double prev_delta = -1.0;
    for (int sweep = 0; sweep < 80; ++sweep) {
        const auto next = backup_table(eta, mdp, pi, rng.next_u64());
        const double delta = max_wasserstein(next, eta, 1.0);
        // geometric decay, checked well above the Monte-Carlo noise floor
        if (prev_delta > 0.2) CHECK(delta <= (0.9 + 0.02) * prev_delta + slack);
        prev_delta = delta;
        eta = next;
    }
    // fixed-point means match the linear-solve values via Q(x,a) = sum P V
    const auto v = policy_evaluation_exact(mdp, pi);
    const double r_max = *std::max_element(mdp.reward.begin(), mdp.reward.end());
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) {
            double q = 0.0;
            const double* row = mdp.row(s, a);
            for (int x = 0; x < 3; ++x) q += row[x] * v[x];
            CHECK(std::abs(eta[s][a].mean() - q) <= 0.01 * r_max / (1.0 - 0.9));
        }
}

TEST_CASE("verify suites pass on a reduced budget") {
    for (const auto& cert : run_lemma1_suite(123, 5, 2000)) CHECK(cert.pass);
    for (const auto& cert : run_lemma2_suite(123, 10)) CHECK(cert.pass);
    for (const auto& cert : run_theorem1_suite(123, 2000)) CHECK(cert.pass);
}
