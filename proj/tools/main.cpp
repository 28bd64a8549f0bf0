#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distrl/config.hpp"
#include "distrl/harness.hpp"
#include "distrl/plot.hpp"
#include "distrl/verify.hpp"

namespace fs = std::filesystem;
using namespace distrl;

namespace {

Config load_with_overrides(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--override expects KEY=VALUE, got '" + ov + "'");
        cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    return cfg;
}

int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

int do_run(const ResolvedConfig& rc, int jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult res = run_sweep(rc, jobs);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(rc.output_dir);
    const std::string stem = rc.output_dir + "/" + rc.suite + "_" + rc.env_name + "_" + rc.agent_name;
    write_raw_csv(stem + "_raw.csv", rc, res.series);
    write_aggregate_csv(stem + "_aggregate.csv", rc, res.aggregate);
    write_metadata(stem + "_metadata.json", rc, wall);

    int failed = 0;
    for (const auto& s : res.series)
        if (s.diverged) {
            ++failed;
            std::cerr << "warning: seed " << s.seed << " diverged; series truncated\n";
        }
    if (failed > 0)
        std::cerr << "warning: aggregate computed over " << (res.series.size() - failed)
                  << " completed seeds\n";
    std::cout << "wrote " << stem << "_{raw,aggregate}.csv and metadata ("
              << res.aggregate.num_seeds << " seeds, " << wall << "s)\n";
    return res.any_failed ? 1 : 0;
}

int do_sweep(const ResolvedConfig& rc, int jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> agents = rc.sweep_agents;
    if (agents.empty()) agents.push_back(rc.agent_name);
    const auto rows = horizon_sweep(rc, rc.sweep_horizons, agents, jobs);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(rc.output_dir);
    const std::string stem = rc.output_dir + "/" + rc.suite + "_" + rc.env_name + "_horizon";
    write_horizon_csv(stem + ".csv", rc, rows);
    write_metadata(stem + "_metadata.json", rc, wall);

    bool any_partial = false;
    for (const auto& r : rows)
        if (r.num_seeds < static_cast<int>(rc.seeds.size())) any_partial = true;
    if (any_partial) std::cerr << "warning: some cells aggregated over fewer seeds than requested\n";
    std::cout << "wrote " << stem << ".csv (" << rows.size() << " rows, " << wall << "s)\n";
    return any_partial ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distrl: distributional RL lab with contraction certificates"};
    app.require_subcommand(1);

    std::string config_path, out_dir, suite_name;
    std::vector<std::string> overrides;
    int jobs = default_jobs();
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (key=value text or flat JSON)");
        cmd->add_option("--override", overrides, "KEY=VALUE config override (repeatable)");
        cmd->add_option("--jobs", jobs, "parallel workers");
        cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
        cmd->add_option("--suite", suite_name, "suite tag (overrides run.suite)");
    };

    auto* cmd_run = app.add_subcommand("run", "run one experiment across seeds");
    add_common(cmd_run);
    auto* cmd_sweep = app.add_subcommand("sweep", "horizon sweep across chain lengths and agents");
    add_common(cmd_sweep);

    auto* cmd_verify = app.add_subcommand("verify", "run contraction certificate suites");
    std::string verify_suite = "all";
    double slack_override = -1.0;
    std::string report_path;
    cmd_verify->add_option("--suite", verify_suite, "all | lemma1 | lemma2 | theorem1");
    cmd_verify->add_option("--seed", seed, "suite seed");
    cmd_verify->add_option("--slack", slack_override, "Monte-Carlo slack override (>= 0)");
    cmd_verify->add_option("--report", report_path, "write the JSON report here (default stdout)");

    auto* cmd_plot = app.add_subcommand("plot", "render SVG learning curves from aggregate CSVs");
    std::vector<std::string> csv_paths;
    std::string svg_path = "curves.svg";
    cmd_plot->add_option("csvs", csv_paths, "aggregate CSV paths")->required();
    cmd_plot->add_option("--out", svg_path, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (cmd_run->parsed() || cmd_sweep->parsed()) {
            Config cfg = load_with_overrides(config_path, overrides);
            if (!out_dir.empty()) cfg.set("output.dir", out_dir);
            if (!suite_name.empty()) cfg.set("run.suite", suite_name);
            const ResolvedConfig rc = resolve_config(cfg);
            return cmd_run->parsed() ? do_run(rc, jobs) : do_sweep(rc, jobs);
        }
        if (cmd_verify->parsed()) {
            VerifyOptions opts;
            opts.suite = verify_suite;
            opts.seed = seed;
            opts.slack_override = slack_override;
            const auto certs = run_verify(opts);
            const std::string report = certificates_json(opts.suite, opts.seed, certs);
            if (report_path.empty()) {
                std::cout << report;
            } else {
                std::ofstream out(report_path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + report_path);
                out << report;
            }
            int failed = 0;
            for (const auto& c : certs)
                if (!c.pass) {
                    ++failed;
                    std::cerr << "FAIL " << c.name << ": lhs=" << c.lhs << " rhs=" << c.rhs
                              << " slack=" << c.slack << " margin=" << c.margin << "\n";
                }
            std::cerr << (certs.size() - failed) << "/" << certs.size() << " certificates passed\n";
            return failed == 0 ? 0 : 1;
        }
        if (cmd_plot->parsed()) {
            write_plot(csv_paths, svg_path);
            std::cout << "wrote " << svg_path << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const PlotError& e) {
        std::cerr << "plot error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
