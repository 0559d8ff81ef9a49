#include "econoswap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace econoswap {

namespace {

constexpr double canvas_w = 800.0;
constexpr double canvas_h = 600.0;
constexpr double plot_left = 90.0;
constexpr double plot_right = 770.0;
constexpr double plot_top = 60.0;
constexpr double plot_bottom = 530.0;

std::string num(double v) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double place(double v, double pixel_lo, double pixel_hi) const {
        const double t = (v - lo) / (hi - lo);
        return pixel_lo + t * (pixel_hi - pixel_lo);
    }
};

void pad(Axis& axis) {
    const double span = axis.hi - axis.lo;
    const double margin = span > 0.0 ? 0.04 * span : 0.5;
    axis.lo -= margin;
    axis.hi += margin;
}

/// Tick positions in axis coordinates, with display labels.
std::vector<std::pair<double, std::string>> ticks_for(const Axis& axis) {
    std::vector<std::pair<double, std::string>> ticks;
    if (axis.log) {
        const int first = static_cast<int>(std::ceil(axis.lo - 1e-9));
        const int last = static_cast<int>(std::floor(axis.hi + 1e-9));
        int step = 1;
        if (last - first > 10) step = (last - first + 9) / 10;
        char buffer[32];
        for (int d = first; d <= last; d += step) {
            std::snprintf(buffer, sizeof(buffer), "1e%d", d);
            ticks.emplace_back(static_cast<double>(d), buffer);
        }
        return ticks;
    }
    const double span = axis.hi - axis.lo;
    const double raw_step = span / 5.0;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw_step)));
    double step = magnitude;
    if (raw_step / magnitude > 5.0)
        step = 10.0 * magnitude;
    else if (raw_step / magnitude > 2.0)
        step = 5.0 * magnitude;
    else if (raw_step / magnitude > 1.0)
        step = 2.0 * magnitude;
    const double start = std::ceil(axis.lo / step) * step;
    for (double v = start; v <= axis.hi + 1e-9 * span; v += step)
        ticks.emplace_back(v, num(std::abs(v) < 1e-12 * span ? 0.0 : v));
    return ticks;
}

}  // namespace

std::string render_plot(const Distribution& dist, const FitResult& fit,
                        PlotMode mode, const std::string& title) {
    const bool log_x = mode == PlotMode::LogLog;

    std::vector<std::pair<double, double>> points;
    for (const Bin& bin : dist.bins) {
        if (!(bin.density > 0.0)) continue;
        if (log_x && !(bin.center > 0.0)) continue;
        points.emplace_back(log_x ? std::log10(bin.center) : bin.center,
                            std::log10(bin.density));
    }
    if (points.size() < 2)
        throw std::invalid_argument(
            "render_plot: fewer than two plottable bins, nothing to draw");

    Axis x_axis;
    Axis y_axis;
    x_axis.log = log_x;
    y_axis.log = true;
    x_axis.lo = y_axis.lo = std::numeric_limits<double>::infinity();
    x_axis.hi = y_axis.hi = -std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : points) {
        x_axis.lo = std::min(x_axis.lo, x);
        x_axis.hi = std::max(x_axis.hi, x);
        y_axis.lo = std::min(y_axis.lo, y);
        y_axis.hi = std::max(y_axis.hi, y);
    }
    pad(x_axis);
    pad(y_axis);

    auto px = [&](double v) {
        return x_axis.place(v, plot_left, plot_right);
    };
    auto py = [&](double v) {
        return y_axis.place(v, plot_bottom, plot_top);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           num(canvas_w) + "\" height=\"" + num(canvas_h) +
           "\" viewBox=\"0 0 " + num(canvas_w) + " " + num(canvas_h) +
           "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<defs><clipPath id=\"plot-area\"><rect x=\"" + num(plot_left) +
           "\" y=\"" + num(plot_top) + "\" width=\"" +
           num(plot_right - plot_left) + "\" height=\"" +
           num(plot_bottom - plot_top) + "\"/></clipPath></defs>\n";

    svg += "<text x=\"" + num(canvas_w / 2) +
           "\" y=\"32\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"18\">" +
           escape_xml(title) + "</text>\n";

    for (const auto& [v, label] : ticks_for(x_axis)) {
        const double x = px(v);
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(plot_top) +
               "\" x2=\"" + num(x) + "\" y2=\"" + num(plot_bottom) +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(plot_bottom + 22) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"12\">" +
               label + "</text>\n";
    }
    for (const auto& [v, label] : ticks_for(y_axis)) {
        const double y = py(v);
        svg += "<line x1=\"" + num(plot_left) + "\" y1=\"" + num(y) +
               "\" x2=\"" + num(plot_right) + "\" y2=\"" + num(y) +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + num(plot_left - 8) + "\" y=\"" + num(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"12\">" +
               label + "</text>\n";
    }

    svg += "<rect x=\"" + num(plot_left) + "\" y=\"" + num(plot_top) +
           "\" width=\"" + num(plot_right - plot_left) + "\" height=\"" +
           num(plot_bottom - plot_top) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    svg += "<text x=\"" + num((plot_left + plot_right) / 2) + "\" y=\"" +
           num(canvas_h - 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">wealth</text>\n";
    svg += "<text x=\"24\" y=\"" + num((plot_top + plot_bottom) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\" transform=\"rotate(-90 24 " +
           num((plot_top + plot_bottom) / 2) + ")\">density</text>\n";

    // Fitted line across the fit window, straight in the transformed
    // coordinates of its own model family.
    const double ln10 = std::log(10.0);
    double fx0 = fit.window_lo;
    double fx1 = fit.window_hi;
    double fy0;
    double fy1;
    if (fit.model == FitModel::Exponential) {
        fy0 = (fit.intercept - fit.exponent * fx0) / ln10;
        fy1 = (fit.intercept - fit.exponent * fx1) / ln10;
        if (log_x) {
            fx0 = std::log10(std::max(fx0, 1e-300));
            fx1 = std::log10(std::max(fx1, 1e-300));
        }
    } else {
        fy0 = (fit.intercept - fit.exponent * std::log(fx0)) / ln10;
        fy1 = (fit.intercept - fit.exponent * std::log(fx1)) / ln10;
        if (log_x) {
            fx0 = std::log10(fx0);
            fx1 = std::log10(fx1);
        }
    }
    svg += "<g clip-path=\"url(#plot-area)\"><line x1=\"" + num(px(fx0)) +
           "\" y1=\"" + num(py(fy0)) + "\" x2=\"" + num(px(fx1)) +
           "\" y2=\"" + num(py(fy1)) +
           "\" stroke=\"#e06010\" stroke-width=\"2\"/></g>\n";

    svg += "<g clip-path=\"url(#plot-area)\">\n";
    for (const auto& [x, y] : points)
        svg += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) +
               "\" r=\"3\" fill=\"#1060c0\"/>\n";
    svg += "</g>\n";

    char annotation[128];
    if (fit.model == FitModel::Exponential)
        std::snprintf(annotation, sizeof(annotation),
                      "rate = %.5g, R&#178; = %.4f", fit.exponent,
                      fit.r_squared);
    else
        std::snprintf(annotation, sizeof(annotation),
                      "gamma = %.4g, R&#178; = %.4f", fit.exponent,
                      fit.r_squared);
    svg += "<text x=\"" + num(plot_right - 12) + "\" y=\"" +
           num(plot_top + 24) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"14\">" +
           annotation + "</text>\n";

    svg += "</svg>\n";
    return svg;
}

}  // namespace econoswap
