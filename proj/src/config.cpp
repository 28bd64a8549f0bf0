#include "distrl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace distrl {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "env.name", "env.n", "env.p_forward", "env.p_backward", "env.mix_alpha",
        "agent.name", "agent.lr", "agent.batch_size", "agent.updates_per_step",
        "agent.quantile_samples", "agent.prior_concentration", "agent.resample_every",
        "agent.hidden_dim", "agent.alpha_beta_offset",
        "run.total_steps", "run.warmup_fraction", "run.gamma", "run.seeds",
        "run.window", "run.suite",
        "output.dir",
        "sweep.horizons", "sweep.agents",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected a number, got '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected an integer, got '" + v + "'");
    }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse(key, item));
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty list");
    return out;
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key))
        throw ConfigError("unknown config key: " + key);
    entries_[key] = value;
}

Config Config::from_entries(const std::map<std::string, std::string>& entries) {
    Config cfg;
    for (const auto& [k, v] : entries) cfg.set(k, v);
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Config cfg;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path + ": invalid JSON: " + e.what());
        }
        // metadata sidecars nest the resolved entries under "config"
        if (j.contains("config") && j["config"].is_object()) j = j["config"];
        if (!j.is_object()) throw ConfigError(path + ": expected a flat JSON object");
        for (const auto& [k, v] : j.items()) {
            std::string value = v.is_string() ? v.get<std::string>() : v.dump();
            try {
                cfg.set(k, value);
            } catch (const ConfigError& e) {
                throw ConfigError(path + ": " + e.what());
            }
        }
        return cfg;
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            cfg.set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

long ResolvedConfig::resolved_total_steps() const {
    if (total_steps > 0) return total_steps;
    return env_name == "latent_riverswim" ? 10000 : 5000;
}

int ResolvedConfig::resolved_hidden_dim() const {
    if (hidden_dim >= 0) return hidden_dim;
    return env_name == "latent_riverswim" ? 128 : 0;
}

long ResolvedConfig::warmup_steps() const {
    return static_cast<long>(warmup_fraction * static_cast<double>(resolved_total_steps()));
}

ResolvedConfig resolve_config(const Config& cfg) {
    ResolvedConfig r;
    for (std::uint64_t s = 0; s < 50; ++s) r.seeds.push_back(s);
    for (const auto& [key, v] : cfg.entries()) {
        if (key == "env.name") r.env_name = v;
        else if (key == "env.n") r.env_n = static_cast<int>(parse_long(key, v));
        else if (key == "env.p_forward") r.p_forward = parse_double(key, v);
        else if (key == "env.p_backward") r.p_backward = parse_double(key, v);
        else if (key == "env.mix_alpha") r.mix_alpha = parse_double(key, v);
        else if (key == "agent.name") r.agent_name = v;
        else if (key == "agent.lr") r.lr = parse_double(key, v);
        else if (key == "agent.batch_size") r.batch_size = static_cast<int>(parse_long(key, v));
        else if (key == "agent.updates_per_step") r.updates_per_step = static_cast<int>(parse_long(key, v));
        else if (key == "agent.quantile_samples") r.quantile_samples = static_cast<int>(parse_long(key, v));
        else if (key == "agent.prior_concentration") r.prior_concentration = parse_double(key, v);
        else if (key == "agent.resample_every") r.resample_every = static_cast<int>(parse_long(key, v));
        else if (key == "agent.hidden_dim") r.hidden_dim = static_cast<int>(parse_long(key, v));
        else if (key == "agent.alpha_beta_offset") r.alpha_beta_offset = parse_double(key, v);
        else if (key == "run.total_steps") r.total_steps = parse_long(key, v);
        else if (key == "run.warmup_fraction") r.warmup_fraction = parse_double(key, v);
        else if (key == "run.gamma") r.gamma = parse_double(key, v);
        else if (key == "run.seeds")
            r.seeds = parse_list<std::uint64_t>(key, v, [](const std::string& k, const std::string& s) {
                return static_cast<std::uint64_t>(parse_long(k, s));
            });
        else if (key == "run.window") r.window = static_cast<int>(parse_long(key, v));
        else if (key == "run.suite") r.suite = v;
        else if (key == "output.dir") r.output_dir = v;
        else if (key == "sweep.horizons")
            r.sweep_horizons = parse_list<int>(key, v, [](const std::string& k, const std::string& s) {
                return static_cast<int>(parse_long(k, s));
            });
        else if (key == "sweep.agents")
            r.sweep_agents = parse_list<std::string>(key, v, [](const std::string&, const std::string& s) {
                return s;
            });
    }

    if (r.env_name != "riverswim" && r.env_name != "latent_riverswim")
        throw ConfigError("env.name must be riverswim or latent_riverswim, got '" + r.env_name + "'");
    if (r.agent_name != "psrl_pi" && r.agent_name != "iqql" && r.agent_name != "daif")
        throw ConfigError("agent.name must be psrl_pi, iqql or daif, got '" + r.agent_name + "'");
    for (const auto& a : r.sweep_agents)
        if (a != "psrl_pi" && a != "iqql" && a != "daif")
            throw ConfigError("sweep.agents: unknown agent '" + a + "'");
    if (r.env_n < 3) throw ConfigError("env.n must be >= 3");
    if (!(r.p_forward > 0.0) || !(r.p_backward > 0.0) || !(r.p_forward + r.p_backward < 1.0))
        throw ConfigError("env probabilities must satisfy 0 < p_forward, 0 < p_backward, p_forward + p_backward < 1");
    if (!(r.mix_alpha > 0.0 && r.mix_alpha < 1.0)) throw ConfigError("env.mix_alpha must be in (0,1)");
    if (!(r.gamma > 0.0 && r.gamma < 1.0)) throw ConfigError("run.gamma must be in (0,1)");
    if (!(r.warmup_fraction >= 0.0 && r.warmup_fraction < 1.0))
        throw ConfigError("run.warmup_fraction must be in [0,1)");
    if (r.window < 1) throw ConfigError("run.window must be >= 1");
    if (r.resolved_total_steps() < r.window)
        throw ConfigError("run.total_steps must be >= run.window");
    if (r.batch_size < 1 || r.updates_per_step < 1 || r.quantile_samples < 1 || r.resample_every < 1)
        throw ConfigError("agent integer settings must be >= 1");
    if (!(r.prior_concentration > 0.0)) throw ConfigError("agent.prior_concentration must be > 0");
    if (r.seeds.empty()) throw ConfigError("run.seeds must be nonempty");
    return r;
}

std::map<std::string, std::string> ResolvedConfig::to_entries() const {
    auto fmt = [](double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    };
    std::map<std::string, std::string> e;
    e["env.name"] = env_name;
    e["env.n"] = std::to_string(env_n);
    e["env.p_forward"] = fmt(p_forward);
    e["env.p_backward"] = fmt(p_backward);
    e["env.mix_alpha"] = fmt(mix_alpha);
    e["agent.name"] = agent_name;
    e["agent.lr"] = fmt(lr);
    e["agent.batch_size"] = std::to_string(batch_size);
    e["agent.updates_per_step"] = std::to_string(updates_per_step);
    e["agent.quantile_samples"] = std::to_string(quantile_samples);
    e["agent.prior_concentration"] = fmt(prior_concentration);
    e["agent.resample_every"] = std::to_string(resample_every);
    e["agent.hidden_dim"] = std::to_string(resolved_hidden_dim());
    e["agent.alpha_beta_offset"] = fmt(alpha_beta_offset);
    e["run.total_steps"] = std::to_string(resolved_total_steps());
    e["run.warmup_fraction"] = fmt(warmup_fraction);
    e["run.gamma"] = fmt(gamma);
    std::string s;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(seeds[i]);
    }
    e["run.seeds"] = s;
    e["run.window"] = std::to_string(window);
    e["run.suite"] = suite;
    e["output.dir"] = output_dir;
    std::string h;
    for (std::size_t i = 0; i < sweep_horizons.size(); ++i) {
        if (i) h += ",";
        h += std::to_string(sweep_horizons[i]);
    }
    e["sweep.horizons"] = h;
    if (!sweep_agents.empty()) {
        std::string a;
        for (std::size_t i = 0; i < sweep_agents.size(); ++i) {
            if (i) a += ",";
            a += sweep_agents[i];
        }
        e["sweep.agents"] = a;
    }
    return e;
}

}  // namespace distrl
