#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "microswim/sensitivity.hpp"

namespace microswim {

/// Minimal SVG line plot (one polyline per series).
void plot_lines_svg(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<double>& x,
                    const std::vector<std::pair<std::string, std::vector<double>>>& series);

/// Scatter of (x, y) points with optional origin lines y = slope * x.
void plot_scatter_svg(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<std::size_t>& group,
                      const std::vector<double>& slopes);

/// Sensitivity heatmap; cell colors saturate at the display clamp (1.5).
void plot_heatmap_svg(const std::filesystem::path& path, const SensitivityReport& report);

}  // namespace microswim
