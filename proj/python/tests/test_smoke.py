import math

import distrl


def test_numerics():
    assert distrl.check_loss(2.0, 0.75) == 1.5
    assert distrl.check_loss(-2.0, 0.75) == 0.5
    assert abs(distrl.digamma(1.0) + 0.5772156649015329) < 1e-10
    # closed form: log(tau(1-tau)) - log(beta) + digamma(alpha) - (alpha/beta)*check_loss
    val = distrl.expected_ald_loglik(1.0, 0.0, 3.0, 2.0, 0.5)
    ref = math.log(0.25) - math.log(2.0) + distrl.digamma(3.0) - (3.0 / 2.0) * 0.5
    assert abs(val - ref) < 1e-12


def test_env_and_planning():
    env = distrl.make_env("riverswim", 6)
    assert env.num_states() == 6
    assert env.num_actions() == 2
    rng = distrl.Rng(0)
    state, reward = env.step(env.initial_state(), 1, rng)
    assert 0 <= state < 6
    assert reward >= 0.0

    mdp = env.as_tabular_mdp(0.95)
    for s in range(6):
        for a in range(2):
            assert abs(sum(mdp.row(s, a)) - 1.0) < 1e-12
    pi = distrl.policy_iteration(mdp, distrl.GreedyPolicy([0] * 6))
    assert pi.action_of[2] == 1  # interior states swim right
    v = distrl.policy_evaluation_exact(mdp, pi)
    assert len(v) == 6 and v[5] == max(v)


def test_wasserstein():
    assert abs(distrl.wasserstein_p([0.0], [3.5], 1.0) - 3.5) < 1e-12
    assert distrl.wasserstein_p([0.0, 1.0], [1.0, 0.0], 1.0) == 0.0


def test_run_and_verify():
    out = distrl.run_single({"env.n": 4, "run.total_steps": 300}, seed=0)
    assert len(out["freq"]) == 300 - 100 + 1
    assert not out["diverged"]

    certs = distrl.verify(suite="lemma2", seed=1)
    assert len(certs) == 50
    assert all(c["pass"] for c in certs)
