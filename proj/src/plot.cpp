#include "distrl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace distrl {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    return buf;
}

// fixed qualitative palette, assigned by curve order
const char* kColors[] = {"#1f6fb4", "#d45500", "#2e8b57", "#8b2e8b",
                         "#b41f1f", "#6b6b1f", "#1fb4a8", "#555555"};

}  // namespace

std::vector<Curve> load_curves(const std::vector<std::string>& csv_paths) {
    if (csv_paths.empty()) throw PlotError("no input CSVs");
    std::vector<Curve> curves;
    std::map<std::string, std::size_t> index;
    for (const auto& path : csv_paths) {
        std::ifstream in(path);
        if (!in) throw PlotError("cannot open " + path);
        std::string line;
        if (!std::getline(in, line)) throw PlotError(path + ": empty CSV");
        const auto header = split_csv_line(line);
        if (header.size() < 7 || header[3] != "step" || header[4] != "mean" || header[5] != "stderr")
            throw PlotError(path + ": expected aggregate CSV header suite,env,agent,step,mean,stderr,num_seeds");
        bool any = false;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cols = split_csv_line(line);
            if (cols.size() < 7) throw PlotError(path + ": malformed row: " + line);
            const std::string label = cols[1] + "/" + cols[2];
            auto it = index.find(label);
            if (it == index.end()) {
                it = index.emplace(label, curves.size()).first;
                curves.push_back(Curve{label, {}, {}, {}});
            }
            Curve& c = curves[it->second];
            try {
                c.steps.push_back(std::stol(cols[3]));
                c.mean.push_back(std::stod(cols[4]));
                c.stderr_.push_back(std::stod(cols[5]));
            } catch (const std::exception&) {
                throw PlotError(path + ": malformed row: " + line);
            }
            any = true;
        }
        if (!any) throw PlotError(path + ": empty CSV");
    }
    for (std::size_t i = 1; i < curves.size(); ++i)
        if (curves[i].steps != curves[0].steps)
            throw PlotError("step grids differ between curves " + curves[0].label +
                            " and " + curves[i].label);
    return curves;
}

std::string render_svg(const std::vector<Curve>& curves) {
    if (curves.empty() || curves[0].steps.empty()) throw PlotError("nothing to plot");
    const double width = 720, height = 480;
    const double ml = 64, mr = 16, mt = 24, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;

    const double x_min = static_cast<double>(curves[0].steps.front());
    const double x_max = static_cast<double>(curves[0].steps.back());
    double y_min = 0.0, y_max = 0.0;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.mean.size(); ++i)
            y_max = std::max(y_max, c.mean[i] + c.stderr_[i]);
    y_max = std::max(y_max * 1.05, 1e-9);

    const double x_span = std::max(x_max - x_min, 1.0);
    auto px = [&](double x) { return ml + (x - x_min) / x_span * pw; };
    auto py = [&](double y) { return mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";

    // axes with 5 ticks each
    svg << "<g stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">\n";
    svg << "<path d=\"M" << fmt(ml) << " " << fmt(mt) << " L" << fmt(ml) << " "
        << fmt(mt + ph) << " L" << fmt(ml + pw) << " " << fmt(mt + ph) << "\"/>\n";
    svg << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_min + (x_max - x_min) * i / 4.0;
        const double yv = y_min + (y_max - y_min) * i / 4.0;
        svg << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(mt + ph + 18)
            << "\" text-anchor=\"middle\">" << static_cast<long>(std::lround(xv)) << "</text>\n";
        svg << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(py(yv) + 4)
            << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    svg << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height - 10)
        << "\" text-anchor=\"middle\">step</text>\n";
    svg << "<text x=\"14\" y=\"" << fmt(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << fmt(mt + ph / 2) << ")\">window visit frequency</text>\n";
    svg << "</g>\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const Curve& c = curves[ci];
        const char* color = kColors[ci % (sizeof(kColors) / sizeof(kColors[0]))];
        // stderr band: upper edge forward, lower edge back
        svg << "<path fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" d=\"";
        for (std::size_t i = 0; i < c.steps.size(); ++i)
            svg << (i == 0 ? "M" : "L") << fmt(px(c.steps[i])) << " "
                << fmt(py(c.mean[i] + c.stderr_[i])) << " ";
        for (std::size_t i = c.steps.size(); i-- > 0;)
            svg << "L" << fmt(px(c.steps[i])) << " " << fmt(py(std::max(y_min, c.mean[i] - c.stderr_[i]))) << " ";
        svg << "Z\"/>\n";
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.steps.size(); ++i)
            svg << fmt(px(c.steps[i])) << "," << fmt(py(c.mean[i])) << " ";
        svg << "\"/>\n";
        // legend entry
        const double ly = mt + 16 + 18.0 * static_cast<double>(ci);
        svg << "<rect x=\"" << fmt(ml + 10) << "\" y=\"" << fmt(ly - 9) << "\" width=\"14\" height=\"10\" fill=\""
            << color << "\"/>\n";
        svg << "<text font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\" x=\""
            << fmt(ml + 30) << "\" y=\"" << fmt(ly) << "\">" << c.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_plot(const std::vector<std::string>& csv_paths, const std::string& svg_path) {
    const auto curves = load_curves(csv_paths);
    const std::string svg = render_svg(curves);
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw PlotError("cannot write " + svg_path);
    out << svg;
}

}  // namespace distrl
