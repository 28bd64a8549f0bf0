#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "distrl/rng.hpp"

namespace distrl {

struct RiverSwimSpec {
    int n = 6;                  // state count, >= 3
    double p_forward = 0.3;
    double p_backward = 0.1;

    void validate() const;      // throws std::invalid_argument
};

// Probability weights over states playing the role of a reward function.
struct DesiredStateDist {
    std::vector<double> weights;

    // weights[n-1] = 0.99, weights[0] = 0.005, interior = 0.005 / (n - 2)
    static DesiredStateDist riverswim(int n);
    void validate() const;
};

struct LatentRiverSwimSpec {
    int n = 6;                  // latent state count
    double p_forward = 0.3;
    double p_backward = 0.1;
    double mix_alpha = 0.5;     // encoder mixing coefficient in (0,1)

    void validate() const;
};

struct TabularMDP {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> transitions;  // [state][action][next], row-stochastic
    std::vector<double> reward;       // per state
    double gamma = 0.95;

    double* row(int s, int a) { return transitions.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states; }
    const double* row(int s, int a) const { return transitions.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states; }
    void check_stochastic(double tol = 1e-12) const;
};

struct Transition {
    int state;
    int action;
    double reward;
    int next_state;
};

// Transition row for 1-based state k and action a in {-1, +1}.
std::vector<double> riverswim_transition_row(const RiverSwimSpec& spec, int k, int a);
double riverswim_reward(const RiverSwimSpec& spec, int k);

// Latent state for 1-based grid observation (i, j): floor(alpha*i + (1-alpha)*j).
int latent_encode(const LatentRiverSwimSpec& spec, int i, int j);
// Latent action in {-1, +1} for a cardinal move (a1, a2).
int latent_action(const LatentRiverSwimSpec& spec, int a1, int a2);

// Common environment interface. States and actions are 0-based indices.
class Env {
public:
    virtual ~Env() = default;
    virtual int num_states() const = 0;
    virtual int num_actions() const = 0;
    virtual int initial_state() const = 0;
    virtual std::pair<int, double> step(int state, int action, Rng& rng) const = 0;
    virtual bool is_most_desired(int state) const = 0;
    virtual TabularMDP as_tabular_mdp(double gamma) const = 0;
};

// Actions: 0 = left (-1), 1 = right (+1). Reward is paid for the arrived state.
class RiverSwim final : public Env {
public:
    explicit RiverSwim(RiverSwimSpec spec);

    int num_states() const override { return spec_.n; }
    int num_actions() const override { return 2; }
    int initial_state() const override { return 0; }
    std::pair<int, double> step(int state, int action, Rng& rng) const override;
    bool is_most_desired(int state) const override { return state == spec_.n - 1; }
    TabularMDP as_tabular_mdp(double gamma) const override;

    const RiverSwimSpec& spec() const { return spec_; }
    const DesiredStateDist& desired() const { return desired_; }

private:
    RiverSwimSpec spec_;
    DesiredStateDist desired_;
    std::vector<double> rows_;  // [state][action][next], precomputed
};

// Observations are grid cells (i, j) in {1..n}^2 flattened to (i-1)*n + (j-1).
// Actions: 0=(+1,0), 1=(-1,0), 2=(0,+1), 3=(0,-1).
class LatentRiverSwim final : public Env {
public:
    explicit LatentRiverSwim(LatentRiverSwimSpec spec);

    int num_states() const override { return spec_.n * spec_.n; }
    int num_actions() const override { return 4; }
    int initial_state() const override { return 0; }  // observation (1,1)
    std::pair<int, double> step(int state, int action, Rng& rng) const override;
    bool is_most_desired(int state) const override { return encode(state) == spec_.n; }
    TabularMDP as_tabular_mdp(double gamma) const override;

    int encode(int obs_index) const;                 // 1-based latent state
    int decode(int latent, Rng& rng) const;          // uniform over the preimage
    const std::vector<int>& preimage(int latent) const { return preimages_[latent - 1]; }
    int obs_index(int i, int j) const { return (i - 1) * spec_.n + (j - 1); }
    std::pair<int, int> obs_coords(int obs_index) const {
        return {obs_index / spec_.n + 1, obs_index % spec_.n + 1};
    }

    const LatentRiverSwimSpec& spec() const { return spec_; }
    const DesiredStateDist& desired() const { return desired_; }

private:
    LatentRiverSwimSpec spec_;
    DesiredStateDist desired_;                 // over latent states
    RiverSwimSpec latent_chain_;
    std::vector<std::vector<int>> preimages_;  // per latent state
    std::vector<int> latent_of_action_;        // {-1,+1} per action index
};

std::unique_ptr<Env> make_env(const std::string& name, int n, double p_forward,
                              double p_backward, double mix_alpha);

// Samples an index from a probability row of length n using one uniform draw.
int sample_categorical(const double* row, int n, double u);

}  // namespace distrl
