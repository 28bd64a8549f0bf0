#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "distrl/envs.hpp"
#include "distrl/mlp.hpp"
#include "distrl/numerics.hpp"
#include "distrl/rng.hpp"

namespace distrl {

struct GreedyPolicy {
    std::vector<int> action_of;
};

struct DirichletPosterior {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> concentration;  // [state][action][next], all > 0

    DirichletPosterior() = default;
    DirichletPosterior(int S, int A, double prior);

    double* row(int s, int a) { return concentration.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states; }
    const double* row(int s, int a) const { return concentration.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states; }
    void update(const Transition& t);
    std::vector<double> posterior_mean_row(int s, int a) const;
};

TabularMDP psrl_sample_mdp(const DirichletPosterior& post, const std::vector<double>& reward,
                           double gamma, Rng& rng);

// Solves (I - gamma * P_pi) V = r exactly; residual <= 1e-10.
std::vector<double> policy_evaluation_exact(const TabularMDP& mdp, const GreedyPolicy& pi);

// Greedy improvement pi(x) := argmax_a [ r(x) + gamma * sum_x' P(x'|x,a) V(x') ]
// until the policy is stable; ties break to the lowest action index.
GreedyPolicy policy_iteration(const TabularMDP& mdp, GreedyPolicy initial);

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void add(const Transition& t);
    const Transition& sample(Rng& rng) const;
    std::size_t size() const { return items_.size(); }
    std::uint64_t insertions() const { return insertions_; }

private:
    std::size_t capacity_;
    std::uint64_t insertions_ = 0;
    std::vector<Transition> items_;
};

struct QuantileCritic {
    enum class Variant { iqql, daif };

    Variant variant;
    int num_states = 0;
    int num_actions = 0;
    double alpha_beta_offset = 10.0;
    Mlp mlp;
    OptimizerState opt;

    QuantileCritic() = default;
    QuantileCritic(Variant variant, int S, int A, int hidden_dim, AdamConfig adam,
                   double alpha_beta_offset, Rng& rng);

    EncodedInput input(int s, int a, double tau) const {
        return EncodedInput{num_states, num_actions, s, a, tau};
    }
    // value head: the scalar output for IQQL, mu for DAIF
    double value(int s, int a, double tau) const;
    DaifHead daif_head(int s, int a, double tau) const;
};

struct CriticSample {
    Transition t;
    double tau;
    double tau_prime;
};

std::vector<CriticSample> draw_batch(const ReplayBuffer& buffer, int batch_size, Rng& rng);

// Mean check loss / negative expected log-likelihood over a fixed batch.
// Pure in the critic parameters; used both for training and gradient checks.
double iqql_batch_loss(const QuantileCritic& critic, const std::vector<CriticSample>& batch,
                       const GreedyPolicy& pi, double gamma);
void iqql_batch_grad(const QuantileCritic& critic, const std::vector<CriticSample>& batch,
                     const GreedyPolicy& pi, double gamma, std::vector<double>& grad);
double daif_batch_loss(const QuantileCritic& critic, const std::vector<CriticSample>& batch,
                       const GreedyPolicy& pi, double gamma);
void daif_batch_grad(const QuantileCritic& critic, const std::vector<CriticSample>& batch,
                     const GreedyPolicy& pi, double gamma, std::vector<double>& grad);

// One Adam step on the batch objective; targets use fresh (tau, tau') per
// sampled transition and are treated as constants.
void iqql_train_step(QuantileCritic& critic, const ReplayBuffer& buffer, int batch_size,
                     const GreedyPolicy& pi, double gamma, Rng& rng);
// Throws std::runtime_error on a non-finite loss.
void daif_train_step(QuantileCritic& critic, const ReplayBuffer& buffer, int batch_size,
                     const GreedyPolicy& pi, double gamma, Rng& rng);

// Averages the value head over K fresh tau draws per (state, action);
// argmax with lowest-index tie-breaking.
GreedyPolicy greedy_policy_from_critic(const QuantileCritic& critic, int K, Rng& rng);

class Agent {
public:
    virtual ~Agent() = default;
    virtual void observe(const Transition& t) = 0;
    virtual void update(Rng& rng) = 0;  // one environment step's worth of learning
    virtual int greedy_action(int state) const = 0;
    virtual bool healthy() const { return true; }
};

// Uniform-random action while step < warmup_steps, greedy afterwards.
int agent_act(const Agent& agent, int state, long step, long warmup_steps,
              int num_actions, Rng& rng);

struct PsrlConfig {
    double prior_concentration = 1.0;
    int resample_every = 1;
};

class PsrlAgent final : public Agent {
public:
    PsrlAgent(int S, int A, std::vector<double> reward, double gamma, PsrlConfig cfg);

    void observe(const Transition& t) override;
    void update(Rng& rng) override;
    int greedy_action(int state) const override { return policy_.action_of[state]; }
    const DirichletPosterior& posterior() const { return posterior_; }
    const GreedyPolicy& policy() const { return policy_; }

private:
    DirichletPosterior posterior_;
    std::vector<double> reward_;
    double gamma_;
    PsrlConfig cfg_;
    GreedyPolicy policy_;
    long steps_ = 0;
};

struct CriticAgentConfig {
    int hidden_dim = 0;
    AdamConfig adam = {};
    int batch_size = 32;
    int updates_per_step = 1;
    int quantile_samples = 16;  // K for policy extraction
    double alpha_beta_offset = 10.0;
    std::size_t replay_capacity = 1u << 20;
};

class CriticAgent final : public Agent {
public:
    CriticAgent(QuantileCritic::Variant variant, int S, int A, double gamma,
                CriticAgentConfig cfg, Rng& init_rng);

    void observe(const Transition& t) override;
    void update(Rng& rng) override;
    int greedy_action(int state) const override { return policy_.action_of[state]; }
    bool healthy() const override { return healthy_; }

    const QuantileCritic& critic() const { return critic_; }
    QuantileCritic& critic() { return critic_; }
    const GreedyPolicy& policy() const { return policy_; }
    const ReplayBuffer& buffer() const { return buffer_; }

private:
    QuantileCritic critic_;
    ReplayBuffer buffer_;
    double gamma_;
    CriticAgentConfig cfg_;
    GreedyPolicy policy_;
    bool healthy_ = true;
};

std::unique_ptr<Agent> make_agent(const std::string& name, const Env& env, double gamma,
                                  const PsrlConfig& psrl, const CriticAgentConfig& critic,
                                  Rng& init_rng);

}  // namespace distrl
