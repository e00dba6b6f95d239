#include "renewal/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace renewal::report {

std::string format_number(double x) {
    if (std::isnan(x)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    out += '\n';
    return out;
}

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

void draw_panel(std::ostream& os, const Panel& panel, double ox, double oy, double w, double h) {
    constexpr double margin_l = 60, margin_r = 15, margin_t = 28, margin_b = 30;
    const double px0 = ox + margin_l, px1 = ox + w - margin_r;
    const double py0 = oy + margin_t, py1 = oy + h - margin_b;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (double v : panel.x) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    for (const auto& s : panel.series)
        for (double v : s.y)
            if (std::isfinite(v)) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) {
        const double pad = std::max(1e-12, std::abs(ymin) * 1e-3);
        ymin -= pad;
        ymax += pad;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) { return px0 + (v - xmin) / (xmax - xmin) * (px1 - px0); };
    auto sy = [&](double v) { return py1 - (v - ymin) / (ymax - ymin) * (py1 - py0); };

    os << "<rect x=\"" << px0 << "\" y=\"" << py0 << "\" width=\"" << (px1 - px0) << "\" height=\""
       << (py1 - py0) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << (ox + w / 2) << "\" y=\"" << (oy + 18)
       << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.title) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        os << "<text x=\"" << sx(xv) << "\" y=\"" << (py1 + 16) << "\" text-anchor=\"middle\" font-size=\"10\">"
           << format_number(std::round(xv * 1000) / 1000) << "</text>\n";
        os << "<text x=\"" << (px0 - 4) << "\" y=\"" << (sy(yv) + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
           << format_number(std::round(yv * 1e4) / 1e4) << "</text>\n";
    }

    const std::size_t n = panel.x.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 800);
    double legend_y = py0 + 14;
    for (const auto& s : panel.series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < n && i < s.y.size(); i += stride) {
            if (!std::isfinite(s.y[i])) continue;
            os << sx(panel.x[i]) << ',' << sy(s.y[i]) << ' ';
        }
        if (n && s.y.size() >= n && (n - 1) % stride != 0) os << sx(panel.x[n - 1]) << ',' << sy(s.y[n - 1]);
        os << "\"/>\n";
        if (!s.label.empty()) {
            os << "<text x=\"" << (px1 - 6) << "\" y=\"" << legend_y << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
               << s.color << "\">" << escape(s.label) << "</text>\n";
            legend_y += 14;
        }
    }
}

}  // namespace

void write_svg_panels(std::ostream& os, const std::vector<Panel>& panels, int panel_width, int panel_height) {
    const int cols = panels.size() > 1 ? 2 : 1;
    const int rows = static_cast<int>((panels.size() + cols - 1) / cols);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * panel_width << "\" height=\""
       << rows * panel_height << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t k = 0; k < panels.size(); ++k) {
        const double ox = static_cast<double>(k % cols) * panel_width;
        const double oy = static_cast<double>(k / cols) * panel_height;
        draw_panel(os, panels[k], ox, oy, panel_width, panel_height);
    }
    os << "</svg>\n";
}

}  // namespace renewal::report
