#pragma once

// Minimal hand-rolled SVG plots for ensemble reports.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "oee/report.hpp"

namespace oee {

/// Bar chart of a log2-binned ratio histogram (zero ratios drawn as a separate bar).
std::string svg_log_histogram(const LogHistogram& hist, const std::string& title, const std::string& x_label);

/// One Tukey box per labelled series, on a log2 value axis.
std::string svg_box_plot(const std::vector<std::pair<std::string, BoxStats>>& boxes, const std::string& title);

/// Scatter of (x, y) points with linear axes.
std::string svg_scatter(const std::vector<std::pair<double, double>>& points, const std::string& title,
                        const std::string& x_label, const std::string& y_label);

/// C-by-k count grid with a white-to-black colour ramp.
std::string svg_heat_grid(const HeatGrid& grid, const std::string& title);

/// Rank-ordered rule frequencies, bars coloured by Wolfram class.
std::string svg_metagenome(const Metagenome& m, const std::string& title);

void write_svg(const std::filesystem::path& path, const std::string& svg);

}  // namespace oee
