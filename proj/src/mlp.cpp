#include "distrl/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "distrl/numerics.hpp"

namespace distrl {

void MlpSpec::validate() const {
    if (input_dim < 1 || output_dim < 1 || hidden_dim < 0)
        throw std::invalid_argument("MlpSpec: invalid dimensions");
}

int MlpSpec::num_params() const {
    if (hidden_dim == 0) return output_dim * input_dim + output_dim;
    return hidden_dim * input_dim + hidden_dim + output_dim * hidden_dim + output_dim;
}

std::vector<double> encode_input(const EncodedInput& in) {
    std::vector<double> v(in.input_dim(), 0.0);
    v[in.state] = 1.0;
    v[in.state_dim + in.action] = 1.0;
    v[in.state_dim + in.action_dim] = in.tau;
    return v;
}

Mlp::Mlp(MlpSpec spec, Rng& rng) : spec_(spec) {
    spec_.validate();
    params_.assign(spec_.num_params(), 0.0);
    const int in = spec_.input_dim;
    const int h = spec_.hidden_dim;
    const int out = spec_.output_dim;
    if (h == 0) {
        w1_ = 0; b1_ = out * in; w2_ = b2_ = -1;
        const double s = 1.0 / std::sqrt(static_cast<double>(in));
        for (int i = 0; i < out * in; ++i) params_[i] = (2.0 * rng.uniform() - 1.0) * s;
    } else {
        w1_ = 0;
        b1_ = h * in;
        w2_ = b1_ + h;
        b2_ = w2_ + out * h;
        const double s1 = 1.0 / std::sqrt(static_cast<double>(in));
        for (int i = 0; i < h * in; ++i) params_[w1_ + i] = (2.0 * rng.uniform() - 1.0) * s1;
        const double s2 = 1.0 / std::sqrt(static_cast<double>(h));
        for (int i = 0; i < out * h; ++i) params_[w2_ + i] = (2.0 * rng.uniform() - 1.0) * s2;
    }
}

// W matrices are stored row-major: W[row * in + col] maps input col to unit row.

std::vector<double> Mlp::forward(const std::vector<double>& input, Cache* cache) const {
    if (static_cast<int>(input.size()) != spec_.input_dim)
        throw std::invalid_argument("Mlp::forward: input size mismatch");
    const int in = spec_.input_dim;
    const int h = spec_.hidden_dim;
    const int out = spec_.output_dim;
    if (cache) {
        cache->input = input;
        cache->state = -1;
    }
    if (h == 0) {
        std::vector<double> y(out);
        for (int r = 0; r < out; ++r) {
            double acc = params_[b1_ + r];
            const double* w = params_.data() + w1_ + static_cast<std::size_t>(r) * in;
            for (int c = 0; c < in; ++c) acc += w[c] * input[c];
            y[r] = acc;
        }
        return y;
    }
    std::vector<double> pre(h);
    for (int r = 0; r < h; ++r) {
        double acc = params_[b1_ + r];
        const double* w = params_.data() + w1_ + static_cast<std::size_t>(r) * in;
        for (int c = 0; c < in; ++c) acc += w[c] * input[c];
        pre[r] = acc;
    }
    if (cache) cache->pre_hidden = pre;
    std::vector<double> y(out);
    for (int r = 0; r < out; ++r) {
        double acc = params_[b2_ + r];
        const double* w = params_.data() + w2_ + static_cast<std::size_t>(r) * h;
        for (int c = 0; c < h; ++c)
            if (pre[c] > 0.0) acc += w[c] * pre[c];
        y[r] = acc;
    }
    return y;
}

std::vector<double> Mlp::forward(const EncodedInput& input, Cache* cache) const {
    if (input.input_dim() != spec_.input_dim)
        throw std::invalid_argument("Mlp::forward: encoded input dimension mismatch");
    if (cache) {
        cache->input.clear();
        cache->state = input.state;
        cache->action = input.state_dim + input.action;
        cache->tau = input.tau;
    }
    return forward_from_columns(input.state, input.state_dim + input.action, input.tau, cache);
}

std::vector<double> Mlp::forward_from_columns(int c0, int c1, double tau, Cache* cache) const {
    const int in = spec_.input_dim;
    const int h = spec_.hidden_dim;
    const int out = spec_.output_dim;
    const int ct = in - 1;
    if (h == 0) {
        std::vector<double> y(out);
        for (int r = 0; r < out; ++r) {
            const double* w = params_.data() + w1_ + static_cast<std::size_t>(r) * in;
            y[r] = params_[b1_ + r] + w[c0] + w[c1] + tau * w[ct];
        }
        return y;
    }
    std::vector<double> pre(h);
    for (int r = 0; r < h; ++r) {
        const double* w = params_.data() + w1_ + static_cast<std::size_t>(r) * in;
        pre[r] = params_[b1_ + r] + w[c0] + w[c1] + tau * w[ct];
    }
    if (cache) cache->pre_hidden = pre;
    std::vector<double> y(out);
    for (int r = 0; r < out; ++r) {
        double acc = params_[b2_ + r];
        const double* w = params_.data() + w2_ + static_cast<std::size_t>(r) * h;
        for (int c = 0; c < h; ++c)
            if (pre[c] > 0.0) acc += w[c] * pre[c];
        y[r] = acc;
    }
    return y;
}

void Mlp::backward(const Cache& cache, const std::vector<double>& output_grad,
                   std::vector<double>& grad) const {
    const int in = spec_.input_dim;
    const int h = spec_.hidden_dim;
    const int out = spec_.output_dim;
    if (static_cast<int>(output_grad.size()) != out)
        throw std::invalid_argument("Mlp::backward: output gradient size mismatch");
    if (static_cast<int>(grad.size()) != spec_.num_params())
        throw std::invalid_argument("Mlp::backward: gradient buffer size mismatch");
    const bool sparse = cache.input.empty();
    const int ct = in - 1;

    auto add_input_outer = [&](int w_base, int row, double g) {
        double* w = grad.data() + w_base + static_cast<std::size_t>(row) * in;
        if (sparse) {
            w[cache.state] += g;
            w[cache.action] += g;
            w[ct] += g * cache.tau;
        } else {
            for (int c = 0; c < in; ++c) w[c] += g * cache.input[c];
        }
    };

    if (h == 0) {
        for (int r = 0; r < out; ++r) {
            const double g = output_grad[r];
            if (g == 0.0) continue;
            grad[b1_ + r] += g;
            add_input_outer(w1_, r, g);
        }
        return;
    }

    // hidden gradient: dL/dpre = relu'(pre) * W2^T * output_grad
    std::vector<double> dpre(h, 0.0);
    for (int r = 0; r < out; ++r) {
        const double g = output_grad[r];
        if (g == 0.0) continue;
        grad[b2_ + r] += g;
        double* wg = grad.data() + w2_ + static_cast<std::size_t>(r) * h;
        const double* w = params_.data() + w2_ + static_cast<std::size_t>(r) * h;
        for (int c = 0; c < h; ++c) {
            if (cache.pre_hidden[c] > 0.0) {
                wg[c] += g * cache.pre_hidden[c];
                dpre[c] += g * w[c];
            }
        }
    }
    for (int r = 0; r < h; ++r) {
        const double g = dpre[r];
        if (g == 0.0) continue;
        grad[b1_ + r] += g;
        add_input_outer(w1_, r, g);
    }
}

void adam_step(std::vector<double>& params, const std::vector<double>& grad, OptimizerState& opt) {
    if (params.size() != grad.size() || params.size() != opt.m.size())
        throw std::invalid_argument("adam_step: size mismatch");
    opt.step += 1;
    const double b1 = opt.cfg.beta1;
    const double b2 = opt.cfg.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(opt.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(opt.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        opt.m[i] = b1 * opt.m[i] + (1.0 - b1) * grad[i];
        opt.v[i] = b2 * opt.v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double mhat = opt.m[i] / c1;
        const double vhat = opt.v[i] / c2;
        params[i] -= opt.cfg.lr * mhat / (std::sqrt(vhat) + opt.cfg.eps);
    }
}

DaifHead head_transform_daif(const double raw[3], double offset) {
    return {raw[0], offset + softplus(raw[1]), offset + softplus(raw[2])};
}

}  // namespace distrl
