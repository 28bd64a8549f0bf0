#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace distrl {

// Raised on unreadable/empty CSVs or mismatched step grids; the CLI maps it
// to exit code 2.
struct PlotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One learning curve read from an aggregate CSV: mean with a +-stderr band.
struct Curve {
    std::string label;  // "env/agent"
    std::vector<long> steps;
    std::vector<double> mean;
    std::vector<double> stderr_;
};

// Parses aggregate CSVs (columns suite,env,agent,step,mean,stderr,num_seeds),
// one curve per (env, agent). All curves must share the same step grid.
std::vector<Curve> load_curves(const std::vector<std::string>& csv_paths);

// Deterministic SVG: one polyline per curve plus a shaded stderr band.
std::string render_svg(const std::vector<Curve>& curves);

void write_plot(const std::vector<std::string>& csv_paths, const std::string& svg_path);

}  // namespace distrl
