#include "distrl/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "distrl/agents.hpp"
#include "distrl/envs.hpp"
#include "distrl/rng.hpp"

namespace distrl {

namespace {

constexpr const char* kVersion = "distrl 0.1.0";

std::unique_ptr<Env> build_env(const ResolvedConfig& cfg) {
    return make_env(cfg.env_name, cfg.env_n, cfg.p_forward, cfg.p_backward, cfg.mix_alpha);
}

std::unique_ptr<Agent> build_agent(const ResolvedConfig& cfg, const Env& env, Rng& init_rng) {
    PsrlConfig psrl;
    psrl.prior_concentration = cfg.prior_concentration;
    psrl.resample_every = cfg.resample_every;
    CriticAgentConfig critic;
    critic.hidden_dim = cfg.resolved_hidden_dim();
    critic.adam.lr = cfg.lr;
    critic.batch_size = cfg.batch_size;
    critic.updates_per_step = cfg.updates_per_step;
    critic.quantile_samples = cfg.quantile_samples;
    critic.alpha_beta_offset = cfg.alpha_beta_offset;
    return make_agent(cfg.agent_name, env, cfg.gamma, psrl, critic, init_rng);
}

}  // namespace

MetricSeries run_single(const ResolvedConfig& cfg, std::uint64_t seed) {
    const auto env = build_env(cfg);
    Rng rng(derive_seed(seed, 0xD157D15721ULL));
    const auto agent = build_agent(cfg, *env, rng);

    const long total = cfg.resolved_total_steps();
    const long warmup = cfg.warmup_steps();
    const int window = cfg.window;

    MetricSeries series;
    series.seed = seed;
    series.env_tag = cfg.env_name;
    series.agent_tag = cfg.agent_name;
    series.freq.reserve(total - window + 1);

    std::vector<char> visits(window, 0);
    int visit_count = 0;
    int state = env->initial_state();
    for (long t = 0; t < total; ++t) {
        const int a = agent_act(*agent, state, t, warmup, env->num_actions(), rng);
        const auto [next, reward] = env->step(state, a, rng);
        agent->observe({state, a, reward, next});
        agent->update(rng);
        if (!agent->healthy()) {
            series.diverged = true;
            break;
        }
        const int slot = static_cast<int>(t % window);
        visit_count -= visits[slot];
        visits[slot] = env->is_most_desired(next) ? 1 : 0;
        visit_count += visits[slot];
        if (t >= window - 1)
            series.freq.push_back(static_cast<double>(visit_count) / window);
        state = next;
    }
    return series;
}

Aggregate aggregate_series(const std::vector<MetricSeries>& series, int window, long thinning) {
    Aggregate agg;
    if (series.empty()) return agg;
    long max_len = 0;
    for (const auto& s : series)
        if (!s.diverged) max_len = std::max<long>(max_len, static_cast<long>(s.freq.size()));
    // checkpoint steps (1-based env steps) at the thinning cadence
    const long total = max_len + window - 1;
    for (long step = window; step <= total; ++step) {
        if (step % thinning != 0 && step != total) continue;
        const long idx = step - window;
        double sum = 0.0, sum_sq = 0.0;
        int n = 0;
        for (const auto& s : series) {
            if (idx >= static_cast<long>(s.freq.size())) continue;
            sum += s.freq[idx];
            sum_sq += s.freq[idx] * s.freq[idx];
            ++n;
        }
        if (n == 0) continue;
        const double mean = sum / n;
        double se = 0.0;
        if (n > 1) {
            const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
            se = std::sqrt(var / n);
        }
        agg.steps.push_back(step);
        agg.mean.push_back(mean);
        agg.stderr_.push_back(se);
        agg.num_seeds = std::max(agg.num_seeds, n);
    }
    return agg;
}

SweepResult run_sweep(const ResolvedConfig& cfg, int jobs) {
    if (cfg.seeds.empty()) throw std::invalid_argument("run_sweep: no seeds");
    SweepResult result;
    result.series.resize(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(cfg.seeds.size())));
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.seeds.size()) return;
            result.series[i] = run_single(cfg, cfg.seeds[i]);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& s : result.series)
        if (s.diverged) result.any_failed = true;
    result.aggregate = aggregate_series(result.series, cfg.window, kCsvThinning);
    return result;
}

std::vector<HorizonRow> horizon_sweep(const ResolvedConfig& base, const std::vector<int>& ns,
                                      const std::vector<std::string>& agents, int jobs) {
    std::vector<HorizonRow> rows;
    for (int n : ns) {
        for (const auto& agent : agents) {
            ResolvedConfig cfg = base;
            cfg.env_n = n;
            cfg.agent_name = agent;
            const SweepResult res = run_sweep(cfg, jobs);
            HorizonRow row;
            row.n = n;
            row.agent = agent;
            row.num_seeds = res.aggregate.num_seeds;
            if (!res.aggregate.mean.empty()) {
                row.final_mean = res.aggregate.mean.back();
                row.final_stderr = res.aggregate.stderr_.back();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

void write_raw_csv(const std::string& path, const ResolvedConfig& cfg,
                   const std::vector<MetricSeries>& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "suite,env,agent,seed,step,window_visit_freq\n";
    const long total = cfg.resolved_total_steps();
    for (const auto& s : series) {
        for (long step = cfg.window; step <= total; ++step) {
            if (step % kCsvThinning != 0 && step != total) continue;
            const long idx = step - cfg.window;
            if (idx >= static_cast<long>(s.freq.size())) break;
            out << cfg.suite << ',' << s.env_tag << ',' << s.agent_tag << ','
                << s.seed << ',' << step << ',' << format_double(s.freq[idx]) << '\n';
        }
    }
}

void write_aggregate_csv(const std::string& path, const ResolvedConfig& cfg,
                         const Aggregate& agg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "suite,env,agent,step,mean,stderr,num_seeds\n";
    for (std::size_t i = 0; i < agg.steps.size(); ++i)
        out << cfg.suite << ',' << cfg.env_name << ',' << cfg.agent_name << ','
            << agg.steps[i] << ',' << format_double(agg.mean[i]) << ','
            << format_double(agg.stderr_[i]) << ',' << agg.num_seeds << '\n';
}

void write_horizon_csv(const std::string& path, const ResolvedConfig& cfg,
                       const std::vector<HorizonRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "suite,env,agent,n,final_mean,final_stderr,num_seeds\n";
    for (const auto& r : rows)
        out << cfg.suite << ',' << cfg.env_name << ',' << r.agent << ',' << r.n << ','
            << format_double(r.final_mean) << ',' << format_double(r.final_stderr) << ','
            << r.num_seeds << '\n';
}

void write_metadata(const std::string& path, const ResolvedConfig& cfg, double wall_seconds) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["wall_seconds"] = wall_seconds;
    j["config"] = nlohmann::json::object();
    for (const auto& [k, v] : cfg.to_entries()) j["config"][k] = v;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace distrl
