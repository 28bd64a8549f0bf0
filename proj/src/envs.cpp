#include "distrl/envs.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace distrl {

void RiverSwimSpec::validate() const {
    if (n < 3) throw std::invalid_argument("RiverSwimSpec: n must be >= 3");
    if (!(p_forward > 0.0) || !(p_backward > 0.0) || !(p_forward + p_backward < 1.0))
        throw std::invalid_argument("RiverSwimSpec: need 0 < p_forward, 0 < p_backward, p_forward + p_backward < 1");
}

DesiredStateDist DesiredStateDist::riverswim(int n) {
    DesiredStateDist d;
    d.weights.assign(n, 0.005 / (n - 2));
    d.weights[0] = 0.005;
    d.weights[n - 1] = 0.99;
    return d;
}

void DesiredStateDist::validate() const {
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("DesiredStateDist: negative weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("DesiredStateDist: weights must sum to 1");
}

void LatentRiverSwimSpec::validate() const {
    RiverSwimSpec rs{n, p_forward, p_backward};
    rs.validate();
    if (!(mix_alpha > 0.0) || !(mix_alpha < 1.0))
        throw std::invalid_argument("LatentRiverSwimSpec: mix_alpha must be in (0,1)");
}

void TabularMDP::check_stochastic(double tol) const {
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) {
            const double* r = row(s, a);
            double sum = 0.0;
            for (int t = 0; t < num_states; ++t) {
                if (r[t] < 0.0) throw std::runtime_error("TabularMDP: negative transition probability");
                sum += r[t];
            }
            if (std::fabs(sum - 1.0) > tol)
                throw std::runtime_error("TabularMDP: transition row does not sum to 1");
        }
}

std::vector<double> riverswim_transition_row(const RiverSwimSpec& spec, int k, int a) {
    spec.validate();
    const int n = spec.n;
    if (k < 1 || k > n) throw std::invalid_argument("riverswim_transition_row: state out of range");
    if (a != -1 && a != 1) throw std::invalid_argument("riverswim_transition_row: action must be -1 or +1");
    std::vector<double> row(n, 0.0);
    if (a == -1) {
        // deterministic left move, stay if already leftmost
        if (k == 1) row[0] = 1.0;
        else row[k - 2] = 1.0;
        return row;
    }
    const double pf = spec.p_forward;
    const double pb = spec.p_backward;
    const double stay = 1.0 - (pf + pb);
    if (k + 1 <= n)
        row[k] = pf * (2 <= k && k <= n - 1 ? 1.0 : 0.0) + stay * (k == 1 ? 1.0 : 0.0);
    row[k - 1] = stay * (k >= 2 ? 1.0 : 0.0) + (pf + pb) * (k == 1 ? 1.0 : 0.0);
    if (k - 1 >= 1)
        row[k - 2] = pb * (2 <= k && k <= n - 1 ? 1.0 : 0.0) + (pf + pb) * (k == n ? 1.0 : 0.0);
    return row;
}

double riverswim_reward(const RiverSwimSpec& spec, int k) {
    if (k < 1 || k > spec.n) throw std::invalid_argument("riverswim_reward: state out of range");
    if (k == spec.n) return 0.99;
    if (k == 1) return 0.005;
    return 0.005 / (spec.n - 2);
}

int latent_encode(const LatentRiverSwimSpec& spec, int i, int j) {
    if (i < 1 || i > spec.n || j < 1 || j > spec.n)
        throw std::invalid_argument("latent_encode: observation out of the grid");
    return static_cast<int>(std::floor(spec.mix_alpha * i + (1.0 - spec.mix_alpha) * j));
}

int latent_action(const LatentRiverSwimSpec& spec, int a1, int a2) {
    const double e = spec.mix_alpha * a1 + (1.0 - spec.mix_alpha) * a2;
    return e >= 0.0 ? 1 : -1;
}

int sample_categorical(const double* row, int n, double u) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += row[i];
        if (u < acc) return i;
    }
    return n - 1;
}

// ---------------------------------------------------------------------------
// RiverSwim

RiverSwim::RiverSwim(RiverSwimSpec spec) : spec_(spec), desired_(DesiredStateDist::riverswim(spec.n)) {
    spec_.validate();
    desired_.validate();
    rows_.resize(static_cast<std::size_t>(spec_.n) * 2 * spec_.n);
    for (int k = 1; k <= spec_.n; ++k)
        for (int ai = 0; ai < 2; ++ai) {
            auto r = riverswim_transition_row(spec_, k, ai == 0 ? -1 : 1);
            std::copy(r.begin(), r.end(),
                      rows_.begin() + (static_cast<std::size_t>(k - 1) * 2 + ai) * spec_.n);
        }
}

std::pair<int, double> RiverSwim::step(int state, int action, Rng& rng) const {
    if (state < 0 || state >= spec_.n || action < 0 || action > 1)
        throw std::invalid_argument("RiverSwim::step: invalid state or action");
    const double* row = rows_.data() + (static_cast<std::size_t>(state) * 2 + action) * spec_.n;
    const int next = sample_categorical(row, spec_.n, rng.uniform());
    return {next, desired_.weights[next]};
}

TabularMDP RiverSwim::as_tabular_mdp(double gamma) const {
    TabularMDP mdp;
    mdp.num_states = spec_.n;
    mdp.num_actions = 2;
    mdp.transitions = rows_;
    mdp.reward = desired_.weights;
    mdp.gamma = gamma;
    mdp.check_stochastic();
    return mdp;
}

// ---------------------------------------------------------------------------
// LatentRiverSwim

LatentRiverSwim::LatentRiverSwim(LatentRiverSwimSpec spec)
    : spec_(spec),
      desired_(DesiredStateDist::riverswim(spec.n)),
      latent_chain_{spec.n, spec.p_forward, spec.p_backward} {
    spec_.validate();
    preimages_.resize(spec_.n);
    for (int i = 1; i <= spec_.n; ++i)
        for (int j = 1; j <= spec_.n; ++j) {
            const int k = latent_encode(spec_, i, j);
            if (k < 1 || k > spec_.n)
                throw std::invalid_argument("LatentRiverSwim: encoder maps outside the latent chain");
            preimages_[k - 1].push_back(obs_index(i, j));
        }
    for (int k = 1; k <= spec_.n; ++k)
        if (preimages_[k - 1].empty())
            throw std::invalid_argument("LatentRiverSwim: empty decoder preimage for latent state");
    static constexpr int moves[4][2] = {{+1, 0}, {-1, 0}, {0, +1}, {0, -1}};
    for (const auto& m : moves)
        latent_of_action_.push_back(latent_action(spec_, m[0], m[1]));
}

int LatentRiverSwim::encode(int obs) const {
    const auto [i, j] = obs_coords(obs);
    return latent_encode(spec_, i, j);
}

int LatentRiverSwim::decode(int latent, Rng& rng) const {
    const auto& pre = preimage(latent);
    return pre[rng.uniform_int(static_cast<int>(pre.size()))];
}

std::pair<int, double> LatentRiverSwim::step(int state, int action, Rng& rng) const {
    if (state < 0 || state >= num_states() || action < 0 || action > 3)
        throw std::invalid_argument("LatentRiverSwim::step: invalid state or action");
    const int k = encode(state);
    const int a_bar = latent_of_action_[action];
    const auto row = riverswim_transition_row(latent_chain_, k, a_bar);
    const int k_next = sample_categorical(row.data(), spec_.n, rng.uniform()) + 1;
    const int obs_next = decode(k_next, rng);
    return {obs_next, desired_.weights[k_next - 1]};
}

TabularMDP LatentRiverSwim::as_tabular_mdp(double gamma) const {
    const int S = num_states();
    TabularMDP mdp;
    mdp.num_states = S;
    mdp.num_actions = 4;
    mdp.transitions.assign(static_cast<std::size_t>(S) * 4 * S, 0.0);
    mdp.reward.resize(S);
    for (int obs = 0; obs < S; ++obs)
        mdp.reward[obs] = desired_.weights[encode(obs) - 1];
    mdp.gamma = gamma;
    for (int obs = 0; obs < S; ++obs) {
        const int k = encode(obs);
        for (int a = 0; a < 4; ++a) {
            const auto lrow = riverswim_transition_row(latent_chain_, k, latent_of_action_[a]);
            double* out = mdp.row(obs, a);
            for (int kn = 1; kn <= spec_.n; ++kn) {
                if (lrow[kn - 1] == 0.0) continue;
                const auto& pre = preimage(kn);
                const double w = lrow[kn - 1] / static_cast<double>(pre.size());
                for (int o : pre) out[o] += w;
            }
        }
    }
    mdp.check_stochastic();
    return mdp;
}

std::unique_ptr<Env> make_env(const std::string& name, int n, double p_forward,
                              double p_backward, double mix_alpha) {
    if (name == "riverswim")
        return std::make_unique<RiverSwim>(RiverSwimSpec{n, p_forward, p_backward});
    if (name == "latent_riverswim")
        return std::make_unique<LatentRiverSwim>(LatentRiverSwimSpec{n, p_forward, p_backward, mix_alpha});
    throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace distrl
