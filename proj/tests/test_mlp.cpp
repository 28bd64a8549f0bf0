#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "distrl/mlp.hpp"
#include "distrl/rng.hpp"

using namespace distrl;

namespace {

// scalar objective for finite-difference checks: dot(output, weights)
double probe(const Mlp& net, const std::vector<double>& input, const std::vector<double>& w) {
    const auto out = net.forward(input);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * w[i];
    return s;
}

}  // namespace

TEST_CASE("input encoding layout and length") {
    const EncodedInput in{3, 2, 1, 1, 0.5};
    const auto v = encode_input(in);
    CHECK(v == std::vector<double>{0, 1, 0, 0, 1, 0.5});
    CHECK(EncodedInput{6, 2, 0, 0, 0.1}.input_dim() == 9);
    CHECK(EncodedInput{64, 4, 0, 0, 0.1}.input_dim() == 69);
}

TEST_CASE("forward basics") {
    Rng rng(1);
    {
        Mlp net(MlpSpec{4, 0, 2}, rng);
        std::fill(net.params().begin(), net.params().end(), 0.0);
        const auto out = net.forward(std::vector<double>{1, 2, 3, 4});
        CHECK(out == std::vector<double>{0.0, 0.0});
    }
    {
        Mlp net(MlpSpec{3, 0, 3}, rng);
        std::fill(net.params().begin(), net.params().end(), 0.0);
        // W stored row-major per output; set identity
        for (int i = 0; i < 3; ++i) net.params()[i * 3 + i] = 1.0;
        const std::vector<double> x = {0.3, -1.2, 2.5};
        const auto out = net.forward(x);
        for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(x[i]));
    }
    {
        Mlp net(MlpSpec{5, 7, 3}, rng);
        const auto out = net.forward(std::vector<double>{1, -2, 0.5, 3, -0.1});
        for (double v : out) CHECK(std::isfinite(v));
    }
}

TEST_CASE("sparse one-hot path matches the dense path") {
    Rng rng(2);
    for (int hidden : {0, 16}) {
        Mlp net(MlpSpec{6 + 2 + 1, hidden, 3}, rng);
        for (int s = 0; s < 6; ++s)
            for (int a = 0; a < 2; ++a) {
                const EncodedInput in{6, 2, s, a, 0.37};
                const auto dense = net.forward(encode_input(in));
                const auto sparse = net.forward(in);
                REQUIRE(dense.size() == sparse.size());
                for (std::size_t i = 0; i < dense.size(); ++i)
                    CHECK(dense[i] == doctest::Approx(sparse[i]).epsilon(1e-14));

                Mlp::Cache cd, cs;
                net.forward(encode_input(in), &cd);
                net.forward(in, &cs);
                std::vector<double> gd(net.params().size(), 0.0), gs(net.params().size(), 0.0);
                const std::vector<double> og = {0.3, -1.1, 0.7};
                net.backward(cd, og, gd);
                net.backward(cs, og, gs);
                for (std::size_t i = 0; i < gd.size(); ++i)
                    CHECK(gd[i] == doctest::Approx(gs[i]).epsilon(1e-12));
            }
    }
}

TEST_CASE("backward matches central finite differences") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const int hidden = trial % 2 == 0 ? 0 : 8;
        Mlp net(MlpSpec{5, hidden, 3}, rng);
        std::vector<double> input(5), og(3);
        for (double& v : input) v = rng.normal();
        for (double& v : og) v = rng.normal();

        Mlp::Cache cache;
        net.forward(input, &cache);
        std::vector<double> grad(net.params().size(), 0.0);
        net.backward(cache, og, grad);

        const double h = 1e-4;
        for (std::size_t i = 0; i < net.params().size(); i += 3) {
            const double orig = net.params()[i];
            net.params()[i] = orig + h;
            const double up = probe(net, input, og);
            net.params()[i] = orig - h;
            const double down = probe(net, input, og);
            net.params()[i] = orig;
            const double fd = (up - down) / (2 * h);
            CHECK(std::abs(grad[i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("backward is linear and zero at zero output gradient") {
    Rng rng(4);
    Mlp net(MlpSpec{4, 6, 2}, rng);
    Mlp::Cache cache;
    net.forward(std::vector<double>{1, 2, -1, 0.5}, &cache);
    std::vector<double> g0(net.params().size(), 0.0);
    net.backward(cache, {0.0, 0.0}, g0);
    for (double v : g0) CHECK(v == 0.0);

    std::vector<double> g1(net.params().size(), 0.0), g2(net.params().size(), 0.0);
    net.backward(cache, {0.4, -0.9}, g1);
    net.backward(cache, {0.8, -1.8}, g2);
    for (std::size_t i = 0; i < g1.size(); ++i)
        CHECK(g2[i] == doctest::Approx(2.0 * g1[i]).epsilon(1e-13));
}

TEST_CASE("adam minimizes a scalar quadratic") {
    std::vector<double> w = {1.0};
    OptimizerState opt(1, AdamConfig{0.1, 0.9, 0.999, 1e-8});
    for (int step = 0; step < 500; ++step) {
        const std::vector<double> grad = {2.0 * w[0]};
        adam_step(w, grad, opt);
        if (step == 49) CHECK(std::abs(w[0]) < 0.5);
    }
    CHECK(std::abs(w[0]) < 1e-3);
}

TEST_CASE("adam zero gradient and determinism") {
    std::vector<double> w = {0.7, -0.2};
    OptimizerState opt(2, {});
    adam_step(w, {0.0, 0.0}, opt);
    CHECK(w == std::vector<double>{0.7, -0.2});

    std::vector<double> w1 = {0.5, 1.5}, w2 = {0.5, 1.5};
    OptimizerState o1(2, {}), o2(2, {});
    for (int i = 0; i < 10; ++i) {
        adam_step(w1, {0.3, -0.1}, o1);
        adam_step(w2, {0.3, -0.1}, o2);
    }
    CHECK(w1 == w2);
}

TEST_CASE("daif head transform") {
    const double raw0[3] = {0.0, 0.0, 0.0};
    const auto h = head_transform_daif(raw0);
    CHECK(h.mu == 0.0);
    CHECK(h.alpha == doctest::Approx(10.0 + std::log(2.0)));
    CHECK(h.beta == doctest::Approx(10.0 + std::log(2.0)));

    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const double raw[3] = {rng.normal() * 10, rng.normal() * 10, rng.normal() * 10};
        const auto t = head_transform_daif(raw);
        CHECK(t.alpha > 10.0);
        CHECK(t.beta > 10.0);
    }
    const double raw_neg[3] = {0.0, -40.0, 0.0};
    CHECK(head_transform_daif(raw_neg).alpha == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("initialization determinism and bounds") {
    Rng r1(9), r2(9);
    Mlp a(MlpSpec{9, 16, 3}, r1), b(MlpSpec{9, 16, 3}, r2);
    CHECK(a.params() == b.params());
    const double limit1 = 1.0 / std::sqrt(9.0);
    for (double w : a.params()) CHECK(std::abs(w) <= std::max(limit1, 1.0 / std::sqrt(16.0)) + 1e-15);
}
