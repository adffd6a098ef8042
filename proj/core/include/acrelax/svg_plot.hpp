#pragma once

// Minimal standalone SVG charts for sweep reports.

#include <string>
#include <vector>

namespace acrelax {

struct Series {
    std::string label;
    std::vector<double> values;  // NaN marks a missing point
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> categories;  // x positions
    std::vector<Series> series;
};

std::string render_grouped_bars(const Chart& chart);
std::string render_lines(const Chart& chart);

}  // namespace acrelax
