#include "svg_chart.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace textchar::cli {
namespace {

constexpr double kWidth = 640;
constexpr double kPanelHeight = 170;
constexpr double kLeft = 80;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kGap = 50;

std::string num(double v, int precision = 4) {
    std::array<char, 48> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, precision);
    return std::string(buf.data(), res.ptr);
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_trend_svg(const std::string& title, const std::string& x_label,
                             const std::vector<double>& x, const std::vector<ChartSeries>& series) {
    const double height = kTop + static_cast<double>(series.size()) * (kPanelHeight + kGap);
    const double plot_w = kWidth - kLeft - kRight;
    double x_lo = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
    double x_hi = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
    if (x_hi == x_lo) x_hi = x_lo + 1.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        const double top = kTop + static_cast<double>(s) * (kPanelHeight + kGap);
        const double bottom = top + kPanelHeight;

        double y_lo = INFINITY, y_hi = -INFINITY;
        for (const auto& v : ser.values) {
            if (v && std::isfinite(*v)) {
                y_lo = std::min(y_lo, *v);
                y_hi = std::max(y_hi, *v);
            }
        }
        if (!std::isfinite(y_lo)) {
            y_lo = 0.0;
            y_hi = 1.0;
        }
        if (y_hi == y_lo) {
            const double pad = y_lo == 0.0 ? 1.0 : std::abs(y_lo) * 0.05;
            y_lo -= pad;
            y_hi += pad;
        }
        auto px = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * plot_w; };
        auto py = [&](double v) { return bottom - (v - y_lo) / (y_hi - y_lo) * kPanelHeight; };

        svg << "<g class=\"panel\" id=\"" << escape(ser.name) << "\">\n";
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << bottom << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << bottom
            << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << top << "\" x2=\"" << kLeft << "\" y2=\"" << bottom
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << kLeft << "\" y=\"" << top - 8 << "\" font-size=\"12\">" << escape(ser.name) << "</text>\n";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << num(y_hi) << "</text>\n";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << bottom << "\" text-anchor=\"end\">" << num(y_lo) << "</text>\n";
        for (double xv : x) {
            svg << "<text x=\"" << px(xv) << "\" y=\"" << bottom + 14 << "\" text-anchor=\"middle\">" << num(xv, 3)
                << "</text>\n";
        }
        svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << bottom + 30 << "\" text-anchor=\"middle\">"
            << escape(x_label) << "</text>\n";

        // A missing value splits the line.
        std::string points;
        auto flush = [&] {
            if (!points.empty()) {
                svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" << points
                    << "\"/>\n";
                points.clear();
            }
        };
        for (std::size_t i = 0; i < x.size() && i < ser.values.size(); ++i) {
            const auto& v = ser.values[i];
            if (!v || !std::isfinite(*v)) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += num(px(x[i]), 6) + "," + num(py(*v), 6);
        }
        flush();
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace textchar::cli
