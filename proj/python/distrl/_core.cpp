#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "distrl/agents.hpp"
#include "distrl/config.hpp"
#include "distrl/envs.hpp"
#include "distrl/harness.hpp"
#include "distrl/numerics.hpp"
#include "distrl/rng.hpp"
#include "distrl/theory.hpp"
#include "distrl/verify.hpp"

namespace py = pybind11;
using namespace distrl;

namespace {

ResolvedConfig resolve_from_dict(const py::dict& d) {
    Config cfg;
    for (const auto& item : d)
        cfg.set(py::cast<std::string>(item.first), py::cast<std::string>(py::str(item.second)));
    return resolve_config(cfg);
}

py::dict cert_to_dict(const Certificate& c) {
    py::dict d;
    d["name"] = c.name;
    d["lhs"] = c.lhs;
    d["rhs"] = c.rhs;
    d["slack"] = c.slack;
    d["margin"] = c.margin;
    d["pass"] = c.pass;
    d["detail"] = c.detail;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "distributional RL lab: environments, agents, contraction certificates";

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &Rng::uniform)
        .def("uniform_int", &Rng::uniform_int, py::arg("n"))
        .def("normal", &Rng::normal);

    py::class_<TabularMDP>(m, "TabularMDP")
        .def_readonly("num_states", &TabularMDP::num_states)
        .def_readonly("num_actions", &TabularMDP::num_actions)
        .def_readonly("reward", &TabularMDP::reward)
        .def_readonly("gamma", &TabularMDP::gamma)
        .def("row", [](const TabularMDP& mdp, int s, int a) {
            const double* r = mdp.row(s, a);
            return std::vector<double>(r, r + mdp.num_states);
        });

    py::class_<Env>(m, "Env")
        .def("num_states", &Env::num_states)
        .def("num_actions", &Env::num_actions)
        .def("initial_state", &Env::initial_state)
        .def("step", [](const Env& env, int s, int a, Rng& rng) { return env.step(s, a, rng); })
        .def("is_most_desired", &Env::is_most_desired)
        .def("as_tabular_mdp", &Env::as_tabular_mdp, py::arg("gamma"));

    m.def("make_env", &make_env, py::arg("name"), py::arg("n"), py::arg("p_forward") = 0.3,
          py::arg("p_backward") = 0.1, py::arg("mix_alpha") = 0.5);

    py::class_<GreedyPolicy>(m, "GreedyPolicy")
        .def(py::init([](std::vector<int> actions) { return GreedyPolicy{std::move(actions)}; }))
        .def_readonly("action_of", &GreedyPolicy::action_of);

    m.def("policy_evaluation_exact", &policy_evaluation_exact, py::arg("mdp"), py::arg("policy"));
    m.def("policy_iteration", &policy_iteration, py::arg("mdp"), py::arg("initial"));

    m.def("check_loss", &check_loss, py::arg("u"), py::arg("tau"));
    m.def("digamma", &digamma, py::arg("x"));
    m.def("expected_ald_loglik", [](double g, double mu, double alpha, double beta, double tau) {
        return expected_ald_loglik(g, mu, InvGammaParams{alpha, beta}, tau);
    }, py::arg("g"), py::arg("mu"), py::arg("alpha"), py::arg("beta"), py::arg("tau"));

    m.def("wasserstein_p", [](std::vector<double> a, std::vector<double> b, double p) {
        return wasserstein_p(EmpiricalReturnDist::from_samples(std::move(a)),
                             EmpiricalReturnDist::from_samples(std::move(b)), p);
    }, py::arg("samples_a"), py::arg("samples_b"), py::arg("p"));

    m.def("run_single", [](const py::dict& cfg, std::uint64_t seed) {
        const MetricSeries s = run_single(resolve_from_dict(cfg), seed);
        py::dict d;
        d["seed"] = s.seed;
        d["env"] = s.env_tag;
        d["agent"] = s.agent_tag;
        d["freq"] = s.freq;
        d["diverged"] = s.diverged;
        return d;
    }, py::arg("config"), py::arg("seed"));

    m.def("run_sweep", [](const py::dict& cfg, int jobs) {
        const SweepResult r = run_sweep(resolve_from_dict(cfg), jobs);
        py::dict d;
        d["steps"] = r.aggregate.steps;
        d["mean"] = r.aggregate.mean;
        d["stderr"] = r.aggregate.stderr_;
        d["num_seeds"] = r.aggregate.num_seeds;
        d["any_failed"] = r.any_failed;
        return d;
    }, py::arg("config"), py::arg("jobs") = 1);

    m.def("verify", [](const std::string& suite, std::uint64_t seed, double slack_override) {
        VerifyOptions opts;
        opts.suite = suite;
        opts.seed = seed;
        opts.slack_override = slack_override;
        py::list out;
        for (const auto& c : run_verify(opts)) out.append(cert_to_dict(c));
        return out;
    }, py::arg("suite") = "all", py::arg("seed") = 0, py::arg("slack_override") = -1.0);
}
