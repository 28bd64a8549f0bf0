#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace distrl {

// Raised for malformed configs; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key-value configuration with sections env.*, agent.*, run.*, output.*,
// sweep.*. Text files hold one `key = value` per line (# comments); .json
// files hold one flat object. Unknown keys are rejected; missing keys fall
// back to documented defaults.
class Config {
public:
    static Config load(const std::string& path);
    static Config from_entries(const std::map<std::string, std::string>& entries);

    void set(const std::string& key, const std::string& value);  // throws on unknown key
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

struct ResolvedConfig {
    // env
    std::string env_name = "riverswim";
    int env_n = 6;
    double p_forward = 0.3;
    double p_backward = 0.1;
    double mix_alpha = 0.5;
    // agent
    std::string agent_name = "psrl_pi";
    double lr = 1e-3;
    int batch_size = 32;
    int updates_per_step = 1;
    int quantile_samples = 16;
    double prior_concentration = 1.0;
    int resample_every = 1;
    int hidden_dim = -1;        // -1: single linear layer for riverswim, 128 hidden for latent
    double alpha_beta_offset = 10.0;
    // run
    long total_steps = -1;      // -1: 5000 for riverswim, 10000 for latent
    double warmup_fraction = 0.10;
    double gamma = 0.95;
    std::vector<std::uint64_t> seeds;  // default 0..49
    int window = 100;
    std::string suite = "default";
    // output
    std::string output_dir = "out";
    // sweep
    std::vector<int> sweep_horizons = {4, 6, 8, 10, 12};
    std::vector<std::string> sweep_agents;  // empty: just agent_name

    long resolved_total_steps() const;
    int resolved_hidden_dim() const;
    long warmup_steps() const;
    // full resolved key set, echoed into the metadata sidecar
    std::map<std::string, std::string> to_entries() const;
};

ResolvedConfig resolve_config(const Config& cfg);  // validates, throws ConfigError

}  // namespace distrl
