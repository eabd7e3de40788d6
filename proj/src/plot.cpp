#include "microswim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "microswim/errors.hpp"

namespace microswim {

namespace {

constexpr double kW = 640.0, kH = 440.0;
constexpr double kML = 70.0, kMR = 20.0, kMT = 40.0, kMB = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Axis {
    double lo = 0.0, hi = 1.0;
    double map(double v, double px0, double px1) const {
        const double f = (v - lo) / (hi - lo);
        return px0 + f * (px1 - px0);
    }
};

Axis fit_axis(const std::vector<double>& vals) {
    Axis a;
    if (vals.empty()) return a;
    a.lo = *std::min_element(vals.begin(), vals.end());
    a.hi = *std::max_element(vals.begin(), vals.end());
    if (a.hi <= a.lo) {
        a.lo -= 0.5;
        a.hi += 0.5;
    }
    const double pad = 0.05 * (a.hi - a.lo);
    a.lo -= pad;
    a.hi += pad;
    return a;
}

std::ofstream open_svg(const std::filesystem::path& path, double w, double h) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write plot: " + path.string());
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
        << "' viewBox='0 0 " << w << " " << h << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n";
    return out;
}

void frame_and_labels(std::ofstream& out, const std::string& title, const std::string& xl,
                      const std::string& yl, const Axis& ax, const Axis& ay) {
    out << "<rect x='" << kML << "' y='" << kMT << "' width='" << kW - kML - kMR << "' height='"
        << kH - kMT - kMB << "' fill='none' stroke='black'/>\n";
    out << "<text x='" << kW / 2 << "' y='24' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";
    out << "<text x='" << kW / 2 << "' y='" << kH - 12 << "' text-anchor='middle' font-size='12'>"
        << xl << "</text>\n";
    out << "<text x='16' y='" << kH / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
        << kH / 2 << ")'>" << yl << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = ax.lo + (ax.hi - ax.lo) * i / 4.0;
        const double fy = ay.lo + (ay.hi - ay.lo) * i / 4.0;
        const double px = kML + (kW - kML - kMR) * i / 4.0;
        const double py = kH - kMB - (kH - kMT - kMB) * i / 4.0;
        char bx[32], by[32];
        std::snprintf(bx, sizeof(bx), "%.3g", fx);
        std::snprintf(by, sizeof(by), "%.3g", fy);
        out << "<text x='" << px << "' y='" << kH - kMB + 16
            << "' text-anchor='middle' font-size='10'>" << bx << "</text>\n";
        out << "<text x='" << kML - 6 << "' y='" << py + 3
            << "' text-anchor='end' font-size='10'>" << by << "</text>\n";
    }
}

}  // namespace

void plot_lines_svg(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<double>& x,
                    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    std::vector<double> all_y;
    for (const auto& [name, ys] : series) all_y.insert(all_y.end(), ys.begin(), ys.end());
    const Axis ax = fit_axis(x), ay = fit_axis(all_y);

    auto out = open_svg(path, kW, kH);
    frame_and_labels(out, title, x_label, y_label, ax, ay);
    std::size_t ci = 0;
    for (const auto& [name, ys] : series) {
        const char* color = kPalette[ci % 8];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < x.size() && i < ys.size(); ++i) {
            if (!std::isfinite(ys[i])) continue;
            out << ax.map(x[i], kML, kW - kMR) << "," << ay.map(ys[i], kH - kMB, kMT) << " ";
        }
        out << "'/>\n";
        out << "<text x='" << kW - kMR - 6 << "' y='" << kMT + 16 + 14 * ci
            << "' text-anchor='end' font-size='11' fill='" << color << "'>" << name
            << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

void plot_scatter_svg(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<std::size_t>& group,
                      const std::vector<double>& slopes) {
    Axis ax = fit_axis(x), ay = fit_axis(y);
    ax.lo = std::min(ax.lo, 0.0);
    ay.lo = std::min(ay.lo, 0.0);

    auto out = open_svg(path, kW, kH);
    frame_and_labels(out, title, x_label, y_label, ax, ay);
    for (std::size_t s = 0; s < slopes.size(); ++s) {
        const double x1 = ax.hi, y1 = slopes[s] * ax.hi;
        out << "<line x1='" << ax.map(0.0, kML, kW - kMR) << "' y1='" << ay.map(0.0, kH - kMB, kMT)
            << "' x2='" << ax.map(x1, kML, kW - kMR) << "' y2='" << ay.map(y1, kH - kMB, kMT)
            << "' stroke='" << kPalette[s % 8] << "' stroke-dasharray='5,3'/>\n";
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t g = i < group.size() ? group[i] : 0;
        out << "<circle cx='" << ax.map(x[i], kML, kW - kMR) << "' cy='"
            << ay.map(y[i], kH - kMB, kMT) << "' r='3' fill='" << kPalette[g % 8] << "'/>\n";
    }
    out << "</svg>\n";
}

void plot_heatmap_svg(const std::filesystem::path& path, const SensitivityReport& report) {
    const std::size_t rows = report.row_labels.size();
    const std::size_t cols = report.col_labels.size();
    const double cell = 34.0;
    const double w = kML + cols * cell + kMR;
    const double h = kMT + rows * cell + kMB;

    auto out = open_svg(path, w, h);
    out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='14'>sensitivity ("
        << (report.regime == GaitRegime::StandingWave ? "SW" : "TW") << " regime, clamp "
        << report.display_clamp << ")</text>\n";
    for (std::size_t r = 0; r < rows; ++r) {
        out << "<text x='" << kML - 6 << "' y='" << kMT + r * cell + cell * 0.65
            << "' text-anchor='end' font-size='11'>" << report.row_labels[r] << "</text>\n";
        for (std::size_t c = 0; c < cols; ++c) {
            double v = report.mean[r][c];
            std::string fill = "#dddddd";
            if (report.valid[r][c] && std::isfinite(v)) {
                v = std::max(0.0, display_clamped(v, report.display_clamp)) /
                    report.display_clamp;
                const int red = static_cast<int>(255.0 * v);
                const int rest = static_cast<int>(255.0 * (1.0 - v));
                char buf[16];
                std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", 255 - rest / 4, rest, rest);
                (void)red;
                fill = buf;
            }
            out << "<rect x='" << kML + c * cell << "' y='" << kMT + r * cell << "' width='"
                << cell - 2 << "' height='" << cell - 2 << "' fill='" << fill
                << "' stroke='#888'/>\n";
        }
    }
    for (std::size_t c = 0; c < cols; ++c)
        out << "<text x='" << kML + c * cell + cell / 2 << "' y='" << kMT + rows * cell + 16
            << "' text-anchor='middle' font-size='11'>" << report.col_labels[c] << "</text>\n";
    out << "</svg>\n";
}

}  // namespace microswim
