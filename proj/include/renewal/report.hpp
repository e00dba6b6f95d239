#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace renewal::report {

/// Shortest round-trip decimal form, capped at 12 significant digits. NaN prints as "NA".
std::string format_number(double x);

/// Joins already-formatted fields with commas and a trailing newline.
std::string csv_line(const std::vector<std::string>& fields);

struct Series {
    std::string label;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct Panel {
    std::string title;
    std::vector<double> x;
    std::vector<Series> series;
};

/// Static SVG with one framed polyline panel per entry, laid out two per row.
void write_svg_panels(std::ostream& os, const std::vector<Panel>& panels, int panel_width = 420,
                      int panel_height = 300);

}  // namespace renewal::report
