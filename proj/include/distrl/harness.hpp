#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distrl/config.hpp"

namespace distrl {

// Trailing-window visitation frequency of the most desired state, one value
// per step from step (window - 1) on.
struct MetricSeries {
    std::uint64_t seed = 0;
    std::string env_tag;
    std::string agent_tag;
    std::vector<double> freq;  // length total_steps - window + 1
    bool diverged = false;     // agent hit a non-finite loss; series truncated
};

struct Aggregate {
    std::vector<long> steps;   // checkpoint step ids (thinned)
    std::vector<double> mean;
    std::vector<double> stderr_;
    int num_seeds = 0;
};

struct SweepResult {
    std::vector<MetricSeries> series;  // ordered by seed index
    Aggregate aggregate;
    bool any_failed = false;
};

// Raw CSV checkpoint cadence.
inline constexpr long kCsvThinning = 50;

MetricSeries run_single(const ResolvedConfig& cfg, std::uint64_t seed);

// Runs every seed (in `jobs` parallel workers), aggregates mean +- standard
// error at each thinned checkpoint. Output is independent of `jobs`.
SweepResult run_sweep(const ResolvedConfig& cfg, int jobs);

Aggregate aggregate_series(const std::vector<MetricSeries>& series, int window, long thinning);

struct HorizonRow {
    int n = 0;
    std::string agent;
    double final_mean = 0.0;
    double final_stderr = 0.0;
    int num_seeds = 0;
};

// Final-window visitation aggregate per (chain length, agent).
std::vector<HorizonRow> horizon_sweep(const ResolvedConfig& base, const std::vector<int>& ns,
                                      const std::vector<std::string>& agents, int jobs);

// CSV + metadata persistence. Writers are byte-deterministic.
void write_raw_csv(const std::string& path, const ResolvedConfig& cfg,
                   const std::vector<MetricSeries>& series);
void write_aggregate_csv(const std::string& path, const ResolvedConfig& cfg,
                         const Aggregate& agg);
void write_horizon_csv(const std::string& path, const ResolvedConfig& cfg,
                       const std::vector<HorizonRow>& rows);
void write_metadata(const std::string& path, const ResolvedConfig& cfg,
                    double wall_seconds);

std::string format_double(double x);  // fixed CSV number formatting

}  // namespace distrl
