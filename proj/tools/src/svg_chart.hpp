#pragma once

#include <optional>
#include <string>
#include <vector>

namespace textchar::cli {

struct ChartSeries {
    std::string name;
    std::vector<std::optional<double>> values;  ///< one per x; nullopt leaves a gap
};

/// Stacked line panels sharing one x axis, one panel per series.
std::string render_trend_svg(const std::string& title, const std::string& x_label,
                             const std::vector<double>& x, const std::vector<ChartSeries>& series);

}  // namespace textchar::cli
