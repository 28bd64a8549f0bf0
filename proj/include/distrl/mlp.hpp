#pragma once

#include <vector>

#include "distrl/rng.hpp"

namespace distrl {

struct MlpSpec {
    int input_dim = 1;
    int hidden_dim = 0;  // 0 means a single linear layer
    int output_dim = 1;

    void validate() const;
    // parameter count for the flat storage layout [W1 | b1 | W2 | b2]
    // (or [W | b] when hidden_dim == 0)
    int num_params() const;
};

// Input for the critics: one-hot(state) + one-hot(action) + scalar tau.
struct EncodedInput {
    int state_dim;
    int action_dim;
    int state;
    int action;
    double tau;

    int input_dim() const { return state_dim + action_dim + 1; }
};

std::vector<double> encode_input(const EncodedInput& in);

// One-hidden-layer ReLU network (or pure linear layer) with manual
// forward/backward passes over flat parameter storage.
class Mlp {
public:
    Mlp() = default;
    Mlp(MlpSpec spec, Rng& rng);  // weights uniform in +-1/sqrt(fan_in), biases zero

    const MlpSpec& spec() const { return spec_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    struct Cache {
        std::vector<double> input;       // dense copy (empty on the sparse path)
        int state = -1, action = -1;     // sparse path bookkeeping
        double tau = 0.0;
        std::vector<double> pre_hidden;  // pre-activation, hidden_dim > 0 only
    };

    std::vector<double> forward(const std::vector<double>& input, Cache* cache = nullptr) const;
    // Fast path for one-hot encoded inputs; only three input columns are live.
    std::vector<double> forward(const EncodedInput& input, Cache* cache = nullptr) const;

    // Accumulates d(output . output_grad)/d(params) into grad (same layout as
    // params; grad must be pre-sized and may carry prior batch contributions).
    void backward(const Cache& cache, const std::vector<double>& output_grad,
                  std::vector<double>& grad) const;

private:
    std::vector<double> forward_from_columns(int c0, int c1, double tau, Cache* cache) const;

    MlpSpec spec_;
    std::vector<double> params_;
    // layout offsets
    int w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct OptimizerState {
    AdamConfig cfg;
    std::vector<double> m, v;
    long step = 0;

    explicit OptimizerState(int num_params = 0, AdamConfig cfg = {})
        : cfg(cfg), m(num_params, 0.0), v(num_params, 0.0) {}
};

// Bias-corrected Adam update, params -= lr * mhat / (sqrt(vhat) + eps).
void adam_step(std::vector<double>& params, const std::vector<double>& grad, OptimizerState& opt);

struct DaifHead {
    double mu;
    double alpha;
    double beta;
};

// mu = raw[0], alpha = offset + softplus(raw[1]), beta = offset + softplus(raw[2]).
DaifHead head_transform_daif(const double raw[3], double offset = 10.0);

}  // namespace distrl
