#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fraudlab {

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points; // (x, y)
};

/// Minimal self-contained SVG line chart: axes, ticks, labels, one polyline
/// per series and a text legend. No external renderer required.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<SvgSeries>& series);

void write_line_chart(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<SvgSeries>& series);

} // namespace fraudlab
