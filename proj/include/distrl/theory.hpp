#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distrl/agents.hpp"
#include "distrl/envs.hpp"
#include "distrl/rng.hpp"

namespace distrl {

// Return distribution as m equally weighted sorted atoms.
struct EmpiricalReturnDist {
    std::vector<double> atoms;  // sorted ascending

    double mean() const;
    static EmpiricalReturnDist from_samples(std::vector<double> samples);
};

// Exact p-Wasserstein on sorted equal-weight atoms; resamples by quantile
// midpoints to a common size when the atom counts differ.
double wasserstein_p(const EmpiricalReturnDist& a, const EmpiricalReturnDist& b, double p);

// Exact p-Wasserstein between two discrete distributions on shared real
// coordinates (quantile coupling; duplicate coordinates are fine).
double discrete_wasserstein_p(const std::vector<double>& coords, const std::vector<double>& w1,
                              const std::vector<double>& w2, double p);

// Rows of a Markov kernel indexed by strictly increasing real input
// coordinates; row distributions live on real-embedded target points.
struct FiniteKernel {
    std::vector<double> coords;              // input coordinates, strictly increasing
    std::vector<double> target_coords;       // coordinates of the target points
    std::vector<std::vector<double>> rows;   // rows[i]: probability vector over targets

    void validate() const;
    int index_of_coord(double s) const;      // exact-match lookup, throws if absent
};

// max over input pairs of W_p(row_i, row_j) / |coord_i - coord_j|.
double lipschitz_constant(const FiniteKernel& k, double p);

// Deterministic coordinate map on a finite point set.
struct CoordinateMap {
    std::vector<double> domain_coords;  // strictly increasing
    std::vector<double> values;

    double lipschitz() const;  // max pairwise slope
};

FiniteKernel compose_kernel(const CoordinateMap& f, const FiniteKernel& k);

struct EncoderDecoderPair {
    std::vector<double> state_coords;    // real embedding of the state set
    std::vector<double> encoder;         // latent coordinate per state
    FiniteKernel decoder;                // latent coordinate -> distribution over states

    double encoder_lipschitz() const;    // throws if equal coords map to different values
};

struct Certificate {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;    // already includes contraction factors (gamma, L_E * L_D)
    double slack = 0.0;
    double margin = 0.0; // rhs + slack - lhs
    bool pass = false;
    std::string detail;
};

// Smallest T with gamma^T * r_max / (1 - gamma) <= tol.
int truncation_horizon(double gamma, double r_max, double tol = 1e-6);

double monte_carlo_slack(double gamma, double r_max, int m);

// m truncated rollouts of sum_t gamma^t r(x_{t+1}) starting with (x0, a0),
// then following pi; reward is paid for the arrived state.
EmpiricalReturnDist return_distribution(const TabularMDP& mdp, const GreedyPolicy& pi,
                                        int x0, int a0, int horizon, int m, Rng& rng);

// Return distributions for every (x, a); rollout randomness is derived from
// `seed` per (x, a) so two kernels evaluated with the same seed share their
// random draws (common random numbers).
using ReturnTable = std::vector<std::vector<EmpiricalReturnDist>>;
ReturnTable return_table(const TabularMDP& kernel_mdp, const std::vector<double>& reward,
                         const GreedyPolicy& pi, int horizon, int m, std::uint64_t seed);

// One application of the distributional Bellman operator with backup kernel
// P*: atoms r(x') + gamma * (random atom of eta(x', pi(x'))), x' ~ P*(.|x,a).
EmpiricalReturnDist bellman_backup(const ReturnTable& eta, const TabularMDP& mdp_star,
                                   const GreedyPolicy& pi, int x, int a, Rng& rng);

ReturnTable backup_table(const ReturnTable& eta, const TabularMDP& mdp_star,
                         const GreedyPolicy& pi, std::uint64_t seed);

double max_wasserstein(const ReturnTable& a, const ReturnTable& b, double p,
                       std::string* argmax_detail = nullptr);

// Lemma: applying the backup operator to return distributions of two kernels
// contracts their maximal Wasserstein distance by gamma.
Certificate check_lemma1(const TabularMDP& mdp_star, const TabularMDP& p_kernel,
                         const TabularMDP& pbar_kernel, const GreedyPolicy& pi,
                         double p, double gamma, int m, Rng& rng);

// Lemma: Lip(k o f) <= Lip(k) * Lip(f), exact up to float tolerance.
Certificate check_lemma2(const CoordinateMap& f, const FiniteKernel& k, double p,
                         double tol = 1e-9);

// Theorem: backing up the auto-encoded processes contracts by
// gamma * L_E * L_D relative to the original processes.
Certificate check_theorem1(const TabularMDP& mdp_star, const TabularMDP& p_kernel,
                           const TabularMDP& pbar_kernel, const EncoderDecoderPair& pair,
                           const GreedyPolicy& pi, double p, double gamma, int m, Rng& rng);

// Dirichlet(1,...,1) transition rows, rewards uniform in [0, 1].
TabularMDP random_mdp(int num_states, int num_actions, double gamma, Rng& rng);
GreedyPolicy random_policy(int num_states, int num_actions, Rng& rng);

}  // namespace distrl
