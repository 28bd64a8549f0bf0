#include "distrl/agents.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace distrl {

DirichletPosterior::DirichletPosterior(int S, int A, double prior)
    : num_states(S), num_actions(A),
      concentration(static_cast<std::size_t>(S) * A * S, prior) {
    if (!(prior > 0.0)) throw std::invalid_argument("DirichletPosterior: prior must be > 0");
}

void DirichletPosterior::update(const Transition& t) {
    if (t.state < 0 || t.state >= num_states || t.next_state < 0 || t.next_state >= num_states ||
        t.action < 0 || t.action >= num_actions)
        throw std::invalid_argument("DirichletPosterior::update: invalid transition indices");
    row(t.state, t.action)[t.next_state] += 1.0;
}

std::vector<double> DirichletPosterior::posterior_mean_row(int s, int a) const {
    const double* r = row(s, a);
    double total = 0.0;
    for (int i = 0; i < num_states; ++i) total += r[i];
    std::vector<double> out(num_states);
    for (int i = 0; i < num_states; ++i) out[i] = r[i] / total;
    return out;
}

TabularMDP psrl_sample_mdp(const DirichletPosterior& post, const std::vector<double>& reward,
                           double gamma, Rng& rng) {
    TabularMDP mdp;
    mdp.num_states = post.num_states;
    mdp.num_actions = post.num_actions;
    mdp.reward = reward;
    mdp.gamma = gamma;
    mdp.transitions.resize(post.concentration.size());
    for (int s = 0; s < post.num_states; ++s)
        for (int a = 0; a < post.num_actions; ++a) {
            const double* c = post.row(s, a);
            double* out = mdp.row(s, a);
            double total = 0.0;
            for (int i = 0; i < post.num_states; ++i) {
                out[i] = sample_gamma(c[i], rng);
                total += out[i];
            }
            for (int i = 0; i < post.num_states; ++i) out[i] /= total;
        }
    return mdp;
}

std::vector<double> policy_evaluation_exact(const TabularMDP& mdp, const GreedyPolicy& pi) {
    const int S = mdp.num_states;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(S, S);
    Eigen::VectorXd b(S);
    for (int s = 0; s < S; ++s) {
        const double* row = mdp.row(s, pi.action_of[s]);
        for (int t = 0; t < S; ++t) A(s, t) -= mdp.gamma * row[t];
        b(s) = mdp.reward[s];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd v = lu.solve(b);
    // one round of iterative refinement keeps the residual near machine precision
    v += lu.solve(b - A * v);
    const double residual = (A * v - b).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-10))
        throw std::runtime_error("policy_evaluation_exact: linear solve residual too large");
    return std::vector<double>(v.data(), v.data() + S);
}

GreedyPolicy policy_iteration(const TabularMDP& mdp, GreedyPolicy pi) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    if (static_cast<int>(pi.action_of.size()) != S)
        throw std::invalid_argument("policy_iteration: policy size mismatch");
    for (int iter = 0; iter < 10000; ++iter) {
        const auto v = policy_evaluation_exact(mdp, pi);
        bool stable = true;
        for (int s = 0; s < S; ++s) {
            int best = 0;
            double best_q = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a) {
                const double* row = mdp.row(s, a);
                double q = 0.0;
                for (int t = 0; t < S; ++t) q += row[t] * v[t];
                q = mdp.reward[s] + mdp.gamma * q;
                if (q > best_q) {
                    best_q = q;
                    best = a;
                }
            }
            if (best != pi.action_of[s]) {
                pi.action_of[s] = best;
                stable = false;
            }
        }
        if (stable) return pi;
    }
    throw std::runtime_error("policy_iteration: failed to stabilize");
}

void ReplayBuffer::add(const Transition& t) {
    if (items_.size() < capacity_) {
        items_.push_back(t);
    } else {
        items_[insertions_ % capacity_] = t;
    }
    ++insertions_;
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
    if (items_.empty()) throw std::runtime_error("ReplayBuffer::sample: empty buffer");
    return items_[rng.uniform_int(static_cast<int>(items_.size()))];
}

QuantileCritic::QuantileCritic(Variant variant, int S, int A, int hidden_dim, AdamConfig adam,
                               double alpha_beta_offset, Rng& rng)
    : variant(variant), num_states(S), num_actions(A), alpha_beta_offset(alpha_beta_offset) {
    MlpSpec spec;
    spec.input_dim = S + A + 1;
    spec.hidden_dim = hidden_dim;
    spec.output_dim = variant == Variant::iqql ? 1 : 3;
    mlp = Mlp(spec, rng);
    opt = OptimizerState(spec.num_params(), adam);
}

double QuantileCritic::value(int s, int a, double tau) const {
    return mlp.forward(input(s, a, tau))[0];
}

DaifHead QuantileCritic::daif_head(int s, int a, double tau) const {
    const auto raw = mlp.forward(input(s, a, tau));
    return head_transform_daif(raw.data(), alpha_beta_offset);
}

std::vector<CriticSample> draw_batch(const ReplayBuffer& buffer, int batch_size, Rng& rng) {
    std::vector<CriticSample> batch;
    batch.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i)
        batch.push_back({buffer.sample(rng), rng.uniform_open(), rng.uniform_open()});
    return batch;
}

double iqql_batch_loss(const QuantileCritic& critic, const std::vector<CriticSample>& batch,
                       const GreedyPolicy& pi, double gamma) {
    double loss = 0.0;
    for (const auto& s : batch) {
        const double target = s.t.reward +
            gamma * critic.value(s.t.next_state, pi.action_of[s.t.next_state], s.tau_prime);
        const double q = critic.value(s.t.state, s.t.action, s.tau);
        loss += check_loss(target - q, s.tau);
    }
    return loss / static_cast<double>(batch.size());
}

void iqql_batch_grad(const QuantileCritic& critic, const std::vector<CriticSample>& batch,
                     const GreedyPolicy& pi, double gamma, std::vector<double>& grad) {
    grad.assign(critic.mlp.params().size(), 0.0);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    Mlp::Cache cache;
    for (const auto& s : batch) {
        const double target = s.t.reward +
            gamma * critic.value(s.t.next_state, pi.action_of[s.t.next_state], s.tau_prime);
        const double q = critic.mlp.forward(critic.input(s.t.state, s.t.action, s.tau), &cache)[0];
        const double u = target - q;
        // d check_loss(u, tau) / dq = -(sign(u) + 2 tau - 1) / 2, sign(0) = +1
        const double g = -(sign_pos(u) + 2.0 * s.tau - 1.0) / 2.0 * inv_b;
        critic.mlp.backward(cache, {g}, grad);
    }
}

double daif_batch_loss(const QuantileCritic& critic, const std::vector<CriticSample>& batch,
                       const GreedyPolicy& pi, double gamma) {
    double loss = 0.0;
    for (const auto& s : batch) {
        const double mu_next =
            critic.value(s.t.next_state, pi.action_of[s.t.next_state], s.tau_prime);
        const double g_target = s.t.reward + gamma * mu_next;
        const auto head = critic.daif_head(s.t.state, s.t.action, s.tau);
        loss -= expected_ald_loglik(g_target, head.mu, {head.alpha, head.beta}, s.tau);
    }
    return loss / static_cast<double>(batch.size());
}

void daif_batch_grad(const QuantileCritic& critic, const std::vector<CriticSample>& batch,
                     const GreedyPolicy& pi, double gamma, std::vector<double>& grad) {
    grad.assign(critic.mlp.params().size(), 0.0);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    Mlp::Cache cache;
    for (const auto& s : batch) {
        const double mu_next =
            critic.value(s.t.next_state, pi.action_of[s.t.next_state], s.tau_prime);
        const double g_target = s.t.reward + gamma * mu_next;
        const auto raw = critic.mlp.forward(critic.input(s.t.state, s.t.action, s.tau), &cache);
        const auto head = head_transform_daif(raw.data(), critic.alpha_beta_offset);
        const double resid = g_target - head.mu;
        const double c = std::fabs(resid) + (2.0 * s.tau - 1.0) * resid;  // 2 * check_loss
        // gradients of the expected log-likelihood L
        const double dL_dmu = (head.alpha / (2.0 * head.beta)) * (sign_pos(resid) + 2.0 * s.tau - 1.0);
        const double dL_dalpha = detail::trigamma(head.alpha) - c / (2.0 * head.beta);
        const double dL_dbeta = -1.0 / head.beta + head.alpha * c / (2.0 * head.beta * head.beta);
        // minimize -L; chain through the softplus head
        const std::vector<double> out_grad = {
            -dL_dmu * inv_b,
            -dL_dalpha * sigmoid(raw[1]) * inv_b,
            -dL_dbeta * sigmoid(raw[2]) * inv_b,
        };
        critic.mlp.backward(cache, out_grad, grad);
    }
}

void iqql_train_step(QuantileCritic& critic, const ReplayBuffer& buffer, int batch_size,
                     const GreedyPolicy& pi, double gamma, Rng& rng) {
    const auto batch = draw_batch(buffer, batch_size, rng);
    std::vector<double> grad;
    iqql_batch_grad(critic, batch, pi, gamma, grad);
    adam_step(critic.mlp.params(), grad, critic.opt);
}

void daif_train_step(QuantileCritic& critic, const ReplayBuffer& buffer, int batch_size,
                     const GreedyPolicy& pi, double gamma, Rng& rng) {
    const auto batch = draw_batch(buffer, batch_size, rng);
    const double loss = daif_batch_loss(critic, batch, pi, gamma);
    if (!std::isfinite(loss))
        throw std::runtime_error("daif_train_step: non-finite loss");
    std::vector<double> grad;
    daif_batch_grad(critic, batch, pi, gamma, grad);
    adam_step(critic.mlp.params(), grad, critic.opt);
}

GreedyPolicy greedy_policy_from_critic(const QuantileCritic& critic, int K, Rng& rng) {
    if (K < 1) throw std::invalid_argument("greedy_policy_from_critic: K must be >= 1");
    GreedyPolicy pi;
    pi.action_of.resize(critic.num_states);
    for (int s = 0; s < critic.num_states; ++s) {
        int best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < critic.num_actions; ++a) {
            double acc = 0.0;
            for (int k = 0; k < K; ++k) acc += critic.value(s, a, rng.uniform_open());
            const double v = acc / static_cast<double>(K);
            if (v > best_v) {
                best_v = v;
                best = a;
            }
        }
        pi.action_of[s] = best;
    }
    return pi;
}

int agent_act(const Agent& agent, int state, long step, long warmup_steps,
              int num_actions, Rng& rng) {
    if (step < warmup_steps) return rng.uniform_int(num_actions);
    return agent.greedy_action(state);
}

PsrlAgent::PsrlAgent(int S, int A, std::vector<double> reward, double gamma, PsrlConfig cfg)
    : posterior_(S, A, cfg.prior_concentration),
      reward_(std::move(reward)), gamma_(gamma), cfg_(cfg) {
    policy_.action_of.assign(S, 0);
}

void PsrlAgent::observe(const Transition& t) { posterior_.update(t); }

void PsrlAgent::update(Rng& rng) {
    ++steps_;
    if (cfg_.resample_every > 1 && steps_ % cfg_.resample_every != 0) return;
    const TabularMDP sampled = psrl_sample_mdp(posterior_, reward_, gamma_, rng);
    policy_ = policy_iteration(sampled, policy_);
}

CriticAgent::CriticAgent(QuantileCritic::Variant variant, int S, int A, double gamma,
                         CriticAgentConfig cfg, Rng& init_rng)
    : critic_(variant, S, A, cfg.hidden_dim, cfg.adam, cfg.alpha_beta_offset, init_rng),
      buffer_(cfg.replay_capacity), gamma_(gamma), cfg_(cfg) {
    policy_.action_of.assign(S, 0);
}

void CriticAgent::observe(const Transition& t) { buffer_.add(t); }

void CriticAgent::update(Rng& rng) {
    if (!healthy_ || buffer_.size() == 0) return;
    try {
        for (int u = 0; u < cfg_.updates_per_step; ++u) {
            if (critic_.variant == QuantileCritic::Variant::iqql)
                iqql_train_step(critic_, buffer_, cfg_.batch_size, policy_, gamma_, rng);
            else
                daif_train_step(critic_, buffer_, cfg_.batch_size, policy_, gamma_, rng);
        }
    } catch (const std::runtime_error&) {
        healthy_ = false;
        return;
    }
    policy_ = greedy_policy_from_critic(critic_, cfg_.quantile_samples, rng);
}

std::unique_ptr<Agent> make_agent(const std::string& name, const Env& env, double gamma,
                                  const PsrlConfig& psrl, const CriticAgentConfig& critic,
                                  Rng& init_rng) {
    if (name == "psrl_pi") {
        const TabularMDP mdp = env.as_tabular_mdp(gamma);
        return std::make_unique<PsrlAgent>(env.num_states(), env.num_actions(), mdp.reward,
                                           gamma, psrl);
    }
    if (name == "iqql")
        return std::make_unique<CriticAgent>(QuantileCritic::Variant::iqql, env.num_states(),
                                             env.num_actions(), gamma, critic, init_rng);
    if (name == "daif")
        return std::make_unique<CriticAgent>(QuantileCritic::Variant::daif, env.num_states(),
                                             env.num_actions(), gamma, critic, init_rng);
    throw std::invalid_argument("unknown agent: " + name);
}

}  // namespace distrl
