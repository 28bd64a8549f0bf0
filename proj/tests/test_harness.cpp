#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "distrl/config.hpp"
#include "distrl/harness.hpp"
#include "distrl/plot.hpp"

using namespace distrl;

namespace {

ResolvedConfig small_config() {
    Config cfg;
    cfg.set("env.n", "4");
    cfg.set("run.total_steps", "800");
    cfg.set("run.seeds", "0,1,2");
    return resolve_config(cfg);
}

MetricSeries series_of(std::vector<double> freq) {
    MetricSeries s;
    s.freq = std::move(freq);
    return s;
}

}  // namespace

TEST_CASE("run_single is deterministic and respects metric bounds") {
    const auto cfg = small_config();
    const auto a = run_single(cfg, 7);
    const auto b = run_single(cfg, 7);
    CHECK(a.freq == b.freq);
    CHECK(a.freq.size() == 800 - 100 + 1);
    for (double f : a.freq) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("aggregate arithmetic") {
    {
        const auto agg = aggregate_series({series_of({0.2, 0.4, 0.6})}, 1, 1);
        CHECK(agg.mean == std::vector<double>{0.2, 0.4, 0.6});
        CHECK(agg.stderr_ == std::vector<double>{0.0, 0.0, 0.0});
        CHECK(agg.num_seeds == 1);
    }
    {
        const auto agg = aggregate_series({series_of({0.3, 0.3}), series_of({0.3, 0.3})}, 1, 1);
        CHECK(agg.stderr_ == std::vector<double>{0.0, 0.0});
    }
    {
        const auto agg = aggregate_series({series_of({0.2}), series_of({0.4})}, 1, 1);
        CHECK(agg.mean[0] == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(agg.stderr_[0] == doctest::Approx(0.1).epsilon(1e-12));
    }
}

TEST_CASE("sweep output does not depend on worker count or seed order") {
    auto cfg = small_config();
    const auto serial = run_sweep(cfg, 1);
    const auto parallel = run_sweep(cfg, 3);
    REQUIRE(serial.series.size() == parallel.series.size());
    for (std::size_t i = 0; i < serial.series.size(); ++i)
        CHECK(serial.series[i].freq == parallel.series[i].freq);
    CHECK(serial.aggregate.mean == parallel.aggregate.mean);

    auto permuted = cfg;
    permuted.seeds = {2, 0, 1};
    const auto shuffled = run_sweep(permuted, 2);
    CHECK(shuffled.series[0].freq == serial.series[2].freq);
    CHECK(shuffled.series[1].freq == serial.series[0].freq);
    CHECK(shuffled.series[2].freq == serial.series[1].freq);
}

TEST_CASE("aggregate csv is recomputable from the raw csv") {
    const auto cfg = small_config();
    const auto res = run_sweep(cfg, 1);
    const std::string raw_path = "/tmp/distrl_test_raw.csv";
    const std::string agg_path = "/tmp/distrl_test_agg.csv";
    write_raw_csv(raw_path, cfg, res.series);
    write_aggregate_csv(agg_path, cfg, res.aggregate);

    // independent recomputation from the raw rows
    std::ifstream raw(raw_path);
    std::string line;
    std::getline(raw, line);
    CHECK(line == "suite,env,agent,seed,step,window_visit_freq");
    std::map<long, std::vector<double>> by_step;
    while (std::getline(raw, line)) {
        std::stringstream ss(line);
        std::string f;
        std::vector<std::string> cols;
        while (std::getline(ss, f, ',')) cols.push_back(f);
        REQUIRE(cols.size() == 6);
        by_step[std::stol(cols[4])].push_back(std::stod(cols[5]));
    }

    std::ifstream agg(agg_path);
    std::getline(agg, line);
    CHECK(line == "suite,env,agent,step,mean,stderr,num_seeds");
    int rows = 0;
    while (std::getline(agg, line)) {
        std::stringstream ss(line);
        std::string f;
        std::vector<std::string> cols;
        while (std::getline(ss, f, ',')) cols.push_back(f);
        REQUIRE(cols.size() == 7);
        const long step = std::stol(cols[3]);
        const auto& vals = by_step.at(step);
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double se = vals.size() > 1
                              ? std::sqrt(var / (static_cast<double>(vals.size()) - 1) /
                                          static_cast<double>(vals.size()))
                              : 0.0;
        CHECK(std::abs(std::stod(cols[4]) - mean) <= 1e-12);
        CHECK(std::abs(std::stod(cols[5]) - se) <= 1e-12);
        CHECK(std::stoi(cols[6]) == 3);
        ++rows;
    }
    CHECK(rows == static_cast<int>(res.aggregate.steps.size()));
}

TEST_CASE("horizon sweep shapes and learning signal") {
    auto cfg = small_config();
    cfg.total_steps = 3000;
    cfg.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    {
        const auto rows = horizon_sweep(cfg, {4}, {"psrl_pi"}, 2);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].n == 4);
        CHECK(rows[0].num_seeds == 10);

        // random-behavior baseline: warmup covering nearly the whole run
        auto random_cfg = cfg;
        random_cfg.warmup_fraction = 0.999;
        const auto base = horizon_sweep(random_cfg, {4}, {"psrl_pi"}, 2);
        CHECK(rows[0].final_mean > base[0].final_mean);
    }
}

TEST_CASE("svg rendering is deterministic and validates input") {
    const auto cfg = small_config();
    const auto res = run_sweep(cfg, 1);
    const std::string agg_path = "/tmp/distrl_test_agg2.csv";
    write_aggregate_csv(agg_path, cfg, res.aggregate);

    const auto curves = load_curves({agg_path});
    REQUIRE(curves.size() == 1);
    CHECK(render_svg(curves) == render_svg(curves));

    const std::string empty_path = "/tmp/distrl_test_empty.csv";
    {
        std::ofstream out(empty_path);
        out << "suite,env,agent,step,mean,stderr,num_seeds\n";
    }
    CHECK_THROWS_AS(load_curves({empty_path}), PlotError);

    // mismatched step grids
    const std::string other_path = "/tmp/distrl_test_agg3.csv";
    {
        std::ofstream out(other_path);
        out << "suite,env,agent,step,mean,stderr,num_seeds\n";
        out << "s,riverswim,other_agent,123,0.5,0.1,2\n";
    }
    CHECK_THROWS_AS(load_curves({agg_path, other_path}), PlotError);
}
