from ._core import (
    Env,
    GreedyPolicy,
    Rng,
    TabularMDP,
    check_loss,
    digamma,
    expected_ald_loglik,
    make_env,
    policy_evaluation_exact,
    policy_iteration,
    run_single,
    run_sweep,
    verify,
    wasserstein_p,
)

__all__ = [
    "Env",
    "GreedyPolicy",
    "Rng",
    "TabularMDP",
    "check_loss",
    "digamma",
    "expected_ald_loglik",
    "make_env",
    "policy_evaluation_exact",
    "policy_iteration",
    "run_single",
    "run_sweep",
    "verify",
    "wasserstein_p",
]
