#include "distrl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace distrl {

double EmpiricalReturnDist::mean() const {
    if (atoms.empty()) return 0.0;
    return std::accumulate(atoms.begin(), atoms.end(), 0.0) / static_cast<double>(atoms.size());
}

EmpiricalReturnDist EmpiricalReturnDist::from_samples(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    return EmpiricalReturnDist{std::move(samples)};
}

namespace {

std::vector<double> resample_atoms(const std::vector<double>& atoms, int m) {
    std::vector<double> out(m);
    const auto n = static_cast<double>(atoms.size());
    for (int i = 0; i < m; ++i) {
        auto idx = static_cast<std::size_t>((i + 0.5) / m * n);
        if (idx >= atoms.size()) idx = atoms.size() - 1;
        out[i] = atoms[idx];
    }
    return out;
}

}  // namespace

double wasserstein_p(const EmpiricalReturnDist& a, const EmpiricalReturnDist& b, double p) {
    if (a.atoms.empty() || b.atoms.empty())
        throw std::invalid_argument("wasserstein_p: empty distribution");
    const std::vector<double>* xa = &a.atoms;
    const std::vector<double>* xb = &b.atoms;
    std::vector<double> ra, rb;
    if (a.atoms.size() != b.atoms.size()) {
        const int m = static_cast<int>(std::max(a.atoms.size(), b.atoms.size()));
        ra = resample_atoms(a.atoms, m);
        rb = resample_atoms(b.atoms, m);
        xa = &ra;
        xb = &rb;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < xa->size(); ++i)
        acc += std::pow(std::fabs((*xa)[i] - (*xb)[i]), p);
    return std::pow(acc / static_cast<double>(xa->size()), 1.0 / p);
}

double discrete_wasserstein_p(const std::vector<double>& coords, const std::vector<double>& w1,
                              const std::vector<double>& w2, double p) {
    if (coords.size() != w1.size() || coords.size() != w2.size())
        throw std::invalid_argument("discrete_wasserstein_p: size mismatch");
    std::vector<int> order(coords.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return coords[i] < coords[j]; });
    // quantile coupling over the merged CDF breakpoints
    std::size_t i = 0, j = 0;
    double mi = 0.0, mj = 0.0;  // mass left at current support points
    double cost = 0.0;
    while (true) {
        while (i < order.size() && mi <= 0.0) mi = w1[order[i++]];
        while (j < order.size() && mj <= 0.0) mj = w2[order[j++]];
        if (mi <= 0.0 || mj <= 0.0) break;
        const double step = std::min(mi, mj);
        cost += step * std::pow(std::fabs(coords[order[i - 1]] - coords[order[j - 1]]), p);
        mi -= step;
        mj -= step;
    }
    return std::pow(cost, 1.0 / p);
}

void FiniteKernel::validate() const {
    if (rows.size() != coords.size())
        throw std::invalid_argument("FiniteKernel: one row per input coordinate required");
    for (std::size_t i = 1; i < coords.size(); ++i)
        if (!(coords[i] > coords[i - 1]))
            throw std::invalid_argument("FiniteKernel: input coordinates must be strictly increasing");
    for (const auto& row : rows) {
        if (row.size() != target_coords.size())
            throw std::invalid_argument("FiniteKernel: row length mismatch");
        double sum = 0.0;
        for (double w : row) {
            if (w < 0.0) throw std::invalid_argument("FiniteKernel: negative probability");
            sum += w;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("FiniteKernel: row does not sum to 1");
    }
}

int FiniteKernel::index_of_coord(double s) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (std::fabs(coords[i] - s) <= 1e-12) return static_cast<int>(i);
    throw std::invalid_argument("FiniteKernel: coordinate not in the kernel's input set");
}

double lipschitz_constant(const FiniteKernel& k, double p) {
    k.validate();
    if (k.coords.size() < 2)
        throw std::invalid_argument("lipschitz_constant: need at least two rows");
    double best = 0.0;
    for (std::size_t i = 0; i < k.coords.size(); ++i)
        for (std::size_t j = i + 1; j < k.coords.size(); ++j) {
            const double d = std::fabs(k.coords[i] - k.coords[j]);
            if (d == 0.0) throw std::invalid_argument("lipschitz_constant: duplicate coordinates");
            const double w = discrete_wasserstein_p(k.target_coords, k.rows[i], k.rows[j], p);
            best = std::max(best, w / d);
        }
    return best;
}

double CoordinateMap::lipschitz() const {
    double best = 0.0;
    for (std::size_t i = 0; i < domain_coords.size(); ++i)
        for (std::size_t j = i + 1; j < domain_coords.size(); ++j) {
            const double d = std::fabs(domain_coords[i] - domain_coords[j]);
            if (d == 0.0) throw std::invalid_argument("CoordinateMap: duplicate domain coordinates");
            best = std::max(best, std::fabs(values[i] - values[j]) / d);
        }
    return best;
}

FiniteKernel compose_kernel(const CoordinateMap& f, const FiniteKernel& k) {
    FiniteKernel out;
    out.coords = f.domain_coords;
    out.target_coords = k.target_coords;
    for (double v : f.values) out.rows.push_back(k.rows[k.index_of_coord(v)]);
    out.validate();
    return out;
}

double EncoderDecoderPair::encoder_lipschitz() const {
    double best = 0.0;
    for (std::size_t i = 0; i < state_coords.size(); ++i)
        for (std::size_t j = i + 1; j < state_coords.size(); ++j) {
            const double d = std::fabs(state_coords[i] - state_coords[j]);
            if (d == 0.0) {
                if (encoder[i] != encoder[j])
                    throw std::invalid_argument(
                        "EncoderDecoderPair: encoder not Lipschitz (equal coords, distinct values)");
                continue;
            }
            best = std::max(best, std::fabs(encoder[i] - encoder[j]) / d);
        }
    return best;
}

int truncation_horizon(double gamma, double r_max, double tol) {
    if (gamma <= 0.0) return 1;
    if (r_max <= 0.0) return 1;
    const double t = std::log(tol * (1.0 - gamma) / r_max) / std::log(gamma);
    return std::max(1, static_cast<int>(std::ceil(t)));
}

double monte_carlo_slack(double gamma, double r_max, int m) {
    return 0.05 * r_max / (1.0 - gamma) / std::sqrt(static_cast<double>(m));
}

EmpiricalReturnDist return_distribution(const TabularMDP& mdp, const GreedyPolicy& pi,
                                        int x0, int a0, int horizon, int m, Rng& rng) {
    std::vector<double> samples(m);
    for (int i = 0; i < m; ++i) {
        double g = 0.0;
        double disc = 1.0;
        int x = x0;
        int a = a0;
        for (int t = 0; t < horizon; ++t) {
            x = sample_categorical(mdp.row(x, a), mdp.num_states, rng.uniform());
            g += disc * mdp.reward[x];
            disc *= mdp.gamma;
            a = pi.action_of[x];
        }
        samples[i] = g;
    }
    return EmpiricalReturnDist::from_samples(std::move(samples));
}

ReturnTable return_table(const TabularMDP& kernel_mdp, const std::vector<double>& reward,
                         const GreedyPolicy& pi, int horizon, int m, std::uint64_t seed) {
    TabularMDP mdp = kernel_mdp;
    mdp.reward = reward;
    ReturnTable table(mdp.num_states, std::vector<EmpiricalReturnDist>(mdp.num_actions));
    for (int x = 0; x < mdp.num_states; ++x)
        for (int a = 0; a < mdp.num_actions; ++a) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(x) * mdp.num_actions + a));
            table[x][a] = return_distribution(mdp, pi, x, a, horizon, m, rng);
        }
    return table;
}

EmpiricalReturnDist bellman_backup(const ReturnTable& eta, const TabularMDP& mdp_star,
                                   const GreedyPolicy& pi, int x, int a, Rng& rng) {
    const int m = static_cast<int>(eta[x][a].atoms.size());
    std::vector<double> samples(m);
    for (int i = 0; i < m; ++i) {
        const int xn = sample_categorical(mdp_star.row(x, a), mdp_star.num_states, rng.uniform());
        const auto& next = eta[xn][pi.action_of[xn]].atoms;
        const double g = next[rng.uniform_int(static_cast<int>(next.size()))];
        samples[i] = mdp_star.reward[xn] + mdp_star.gamma * g;
    }
    return EmpiricalReturnDist::from_samples(std::move(samples));
}

ReturnTable backup_table(const ReturnTable& eta, const TabularMDP& mdp_star,
                         const GreedyPolicy& pi, std::uint64_t seed) {
    ReturnTable out(mdp_star.num_states, std::vector<EmpiricalReturnDist>(mdp_star.num_actions));
    for (int x = 0; x < mdp_star.num_states; ++x)
        for (int a = 0; a < mdp_star.num_actions; ++a) {
            Rng rng(derive_seed(seed, 0x7000000ULL + static_cast<std::uint64_t>(x) * mdp_star.num_actions + a));
            out[x][a] = bellman_backup(eta, mdp_star, pi, x, a, rng);
        }
    return out;
}

double max_wasserstein(const ReturnTable& a, const ReturnTable& b, double p,
                       std::string* argmax_detail) {
    double best = -1.0;
    int bx = 0, ba = 0;
    for (std::size_t x = 0; x < a.size(); ++x)
        for (std::size_t ai = 0; ai < a[x].size(); ++ai) {
            const double w = wasserstein_p(a[x][ai], b[x][ai], p);
            if (w > best) {
                best = w;
                bx = static_cast<int>(x);
                ba = static_cast<int>(ai);
            }
        }
    if (argmax_detail)
        *argmax_detail = "sup at (x=" + std::to_string(bx) + ", a=" + std::to_string(ba) + ")";
    return best;
}

Certificate check_lemma1(const TabularMDP& mdp_star, const TabularMDP& p_kernel,
                         const TabularMDP& pbar_kernel, const GreedyPolicy& pi,
                         double p, double gamma, int m, Rng& rng) {
    TabularMDP star = mdp_star;
    star.gamma = gamma;
    const double r_max = *std::max_element(star.reward.begin(), star.reward.end());
    const int horizon = truncation_horizon(gamma, r_max);
    const std::uint64_t seed_eta = rng.next_u64();
    const std::uint64_t seed_backup = rng.next_u64();

    TabularMDP pk = p_kernel;
    pk.gamma = gamma;
    TabularMDP pbk = pbar_kernel;
    pbk.gamma = gamma;
    const ReturnTable eta_p = return_table(pk, star.reward, pi, horizon, m, seed_eta);
    const ReturnTable eta_pbar = return_table(pbk, star.reward, pi, horizon, m, seed_eta);
    const ReturnTable backed_p = backup_table(eta_p, star, pi, seed_backup);
    const ReturnTable backed_pbar = backup_table(eta_pbar, star, pi, seed_backup);

    Certificate cert;
    cert.name = "lemma1";
    cert.lhs = max_wasserstein(backed_p, backed_pbar, p, &cert.detail);
    cert.rhs = gamma * max_wasserstein(eta_p, eta_pbar, p);
    cert.slack = monte_carlo_slack(gamma, r_max, m);
    cert.margin = cert.rhs + cert.slack - cert.lhs;
    cert.pass = cert.lhs <= cert.rhs + cert.slack;
    return cert;
}

Certificate check_lemma2(const CoordinateMap& f, const FiniteKernel& k, double p, double tol) {
    const FiniteKernel composite = compose_kernel(f, k);
    Certificate cert;
    cert.name = "lemma2";
    cert.lhs = lipschitz_constant(composite, p);
    cert.rhs = lipschitz_constant(k, p) * f.lipschitz();
    cert.slack = tol;
    cert.margin = cert.rhs + cert.slack - cert.lhs;
    cert.pass = cert.lhs <= cert.rhs + cert.slack;
    return cert;
}

namespace {

// (P_D S) P: first transition by P, then re-encode/decode the landed state.
TabularMDP autoencode_kernel(const TabularMDP& kernel, const EncoderDecoderPair& pair) {
    TabularMDP out = kernel;
    std::fill(out.transitions.begin(), out.transitions.end(), 0.0);
    const int S = kernel.num_states;
    for (int x = 0; x < S; ++x)
        for (int a = 0; a < kernel.num_actions; ++a) {
            const double* in_row = kernel.row(x, a);
            double* out_row = out.row(x, a);
            for (int x1 = 0; x1 < S; ++x1) {
                if (in_row[x1] == 0.0) continue;
                const auto& dec = pair.decoder.rows[pair.decoder.index_of_coord(pair.encoder[x1])];
                for (int x2 = 0; x2 < S; ++x2) out_row[x2] += in_row[x1] * dec[x2];
            }
        }
    out.check_stochastic(1e-9);
    return out;
}

}  // namespace

Certificate check_theorem1(const TabularMDP& mdp_star, const TabularMDP& p_kernel,
                           const TabularMDP& pbar_kernel, const EncoderDecoderPair& pair,
                           const GreedyPolicy& pi, double p, double gamma, int m, Rng& rng) {
    TabularMDP star = mdp_star;
    star.gamma = gamma;
    const double r_max = *std::max_element(star.reward.begin(), star.reward.end());
    const int horizon = truncation_horizon(gamma, r_max);
    // seed draws mirror check_lemma1, and the transformed tables reuse
    // seed_eta, so an identity autoencoder reproduces the one-step
    // contraction certificate exactly
    const std::uint64_t seed_eta = rng.next_u64();
    const std::uint64_t seed_backup = rng.next_u64();

    TabularMDP pk = p_kernel;
    pk.gamma = gamma;
    TabularMDP pbk = pbar_kernel;
    pbk.gamma = gamma;
    const TabularMDP pk_t = autoencode_kernel(pk, pair);
    const TabularMDP pbk_t = autoencode_kernel(pbk, pair);

    const ReturnTable eta_p = return_table(pk, star.reward, pi, horizon, m, seed_eta);
    const ReturnTable eta_pbar = return_table(pbk, star.reward, pi, horizon, m, seed_eta);
    const ReturnTable eta_pt = return_table(pk_t, star.reward, pi, horizon, m, seed_eta);
    const ReturnTable eta_pbt = return_table(pbk_t, star.reward, pi, horizon, m, seed_eta);
    const ReturnTable backed_pt = backup_table(eta_pt, star, pi, seed_backup);
    const ReturnTable backed_pbt = backup_table(eta_pbt, star, pi, seed_backup);

    const double l_e = pair.encoder_lipschitz();
    const double l_d = lipschitz_constant(pair.decoder, p);

    Certificate cert;
    cert.name = "theorem1";
    cert.lhs = max_wasserstein(backed_pt, backed_pbt, p, &cert.detail);
    cert.rhs = gamma * l_e * l_d * max_wasserstein(eta_p, eta_pbar, p);
    cert.slack = monte_carlo_slack(gamma, r_max, m);
    cert.margin = cert.rhs + cert.slack - cert.lhs;
    cert.pass = cert.lhs <= cert.rhs + cert.slack;
    cert.detail += " L_E=" + std::to_string(l_e) + " L_D=" + std::to_string(l_d);
    return cert;
}

TabularMDP random_mdp(int num_states, int num_actions, double gamma, Rng& rng) {
    TabularMDP mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.gamma = gamma;
    mdp.transitions.resize(static_cast<std::size_t>(num_states) * num_actions * num_states);
    const std::vector<double> ones(num_states, 1.0);
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) {
            const auto row = sample_dirichlet(ones, rng);
            std::copy(row.begin(), row.end(), mdp.row(s, a));
        }
    mdp.reward.resize(num_states);
    for (double& r : mdp.reward) r = rng.uniform();
    return mdp;
}

GreedyPolicy random_policy(int num_states, int num_actions, Rng& rng) {
    GreedyPolicy pi;
    pi.action_of.resize(num_states);
    for (int& a : pi.action_of) a = rng.uniform_int(num_actions);
    return pi;
}

}  // namespace distrl
