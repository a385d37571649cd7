#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <array>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gradflow/simulator.hpp"
#include "gradflow/trajectory_csv.hpp"

namespace gradflow {

namespace svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool equal_aspect = false;
};

inline constexpr double kPanelWidth = 420.0;
inline constexpr double kPanelHeight = 320.0;
inline constexpr double kMargin = 56.0;
inline constexpr std::size_t kMaxPoints = 4000;

inline std::string num(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.2f", v);
    return buf.data();
}

inline std::string tick(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.3g", v);
    return buf.data();
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo <= hi)) lo = -1.0, hi = 1.0;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
        const double m = 0.05 * (hi - lo);
        lo -= m, hi += m;
    }
};

inline void draw_panel(std::ostream& os, const Panel& p, double x0) {
    Range rx, ry;
    for (const auto& s : p.series) {
        for (double v : s.xs) rx.add(v);
        for (double v : s.ys) ry.add(v);
    }
    rx.pad();
    ry.pad();
    const double w = kPanelWidth - 2 * kMargin;
    const double h = kPanelHeight - 2 * kMargin;
    if (p.equal_aspect) {
        // Grow the tighter axis so one data unit has the same length on both.
        const double scale = std::max((rx.hi - rx.lo) / w, (ry.hi - ry.lo) / h);
        const double cx = 0.5 * (rx.lo + rx.hi), cy = 0.5 * (ry.lo + ry.hi);
        rx = {cx - 0.5 * scale * w, cx + 0.5 * scale * w};
        ry = {cy - 0.5 * scale * h, cy + 0.5 * scale * h};
    }
    const auto px = [&](double v) { return x0 + kMargin + (v - rx.lo) / (rx.hi - rx.lo) * w; };
    const auto py = [&](double v) { return kMargin + h - (v - ry.lo) / (ry.hi - ry.lo) * h; };

    os << "<g class=\"panel\">\n";
    os << "<rect x=\"" << num(x0 + kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(w)
       << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << num(x0 + kPanelWidth / 2) << "\" y=\"" << num(kMargin - 24)
       << "\" text-anchor=\"middle\" font-size=\"14\">" << p.title << "</text>\n";
    os << "<text x=\"" << num(x0 + kPanelWidth / 2) << "\" y=\"" << num(kPanelHeight - 14)
       << "\" text-anchor=\"middle\" font-size=\"12\">" << p.x_label << "</text>\n";
    os << "<text x=\"" << num(x0 + 14) << "\" y=\"" << num(kPanelHeight / 2) << "\" text-anchor=\"middle\""
       << " font-size=\"12\" transform=\"rotate(-90 " << num(x0 + 14) << ' ' << num(kPanelHeight / 2) << ")\">"
       << p.y_label << "</text>\n";
    for (double v : {rx.lo, 0.5 * (rx.lo + rx.hi), rx.hi})
        os << "<text x=\"" << num(px(v)) << "\" y=\"" << num(kMargin + h + 14)
           << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(v) << "</text>\n";
    for (double v : {ry.lo, 0.5 * (ry.lo + ry.hi), ry.hi})
        os << "<text x=\"" << num(x0 + kMargin - 4) << "\" y=\"" << num(py(v) + 3)
           << "\" text-anchor=\"end\" font-size=\"10\">" << tick(v) << "</text>\n";

    double legend_y = kMargin + 12;
    for (const auto& s : p.series) {
        const std::size_t n = std::min(s.xs.size(), s.ys.size());
        const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPoints - 1) / kMaxPoints);
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        std::vector<std::size_t> picks;
        for (std::size_t i = 0; i < n; i += stride) picks.push_back(i);
        if (n > 0 && picks.back() != n - 1) picks.push_back(n - 1);
        for (std::size_t k = 0; k < picks.size(); ++k)
            os << (k ? " " : "") << num(px(s.xs[picks[k]])) << ',' << num(py(s.ys[picks[k]]));
        os << "\"/>\n";
        os << "<text x=\"" << num(x0 + kPanelWidth - kMargin - 4) << "\" y=\"" << num(legend_y)
           << "\" text-anchor=\"end\" font-size=\"10\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
        legend_y += 12;
    }
    os << "</g>\n";
}

}  // namespace svg

/// Three side-by-side panels: planar path, states against time, controls against time.
/// Output bytes depend only on the trajectory.
inline void write_trajectory_svg(std::ostream& os, const Trajectory& traj) {
    const auto column = [&](auto get) {
        std::vector<double> v;
        v.reserve(traj.rows.size());
        for (const auto& r : traj.rows) v.push_back(get(r));
        return v;
    };
    const auto t = column([](const TrajectoryRow& r) { return r.t; });
    const auto x1 = column([](const TrajectoryRow& r) { return r.x.x1; });
    const auto x2 = column([](const TrajectoryRow& r) { return r.x.x2; });
    const auto x3 = column([](const TrajectoryRow& r) { return r.x.x3; });
    const auto u1 = column([](const TrajectoryRow& r) { return r.u.u1; });
    const auto u2 = column([](const TrajectoryRow& r) { return r.u.u2; });

    const std::vector<svg::Panel> panels{
        {"path", "x1 [m]", "x2 [m]", {{"(x1, x2)", "#1f77b4", x1, x2}}, true},
        {"states", "t [s]", "x1, x2 [m]; x3 [rad]",
         {{"x1 [m]", "#1f77b4", t, x1}, {"x2 [m]", "#ff7f0e", t, x2}, {"x3 [rad]", "#2ca02c", t, x3}}},
        {"controls", "t [s]", "u1 [m/s]; u2 [rad/s]",
         {{"u1 [m/s]", "#d62728", t, u1}, {"u2 [rad/s]", "#9467bd", t, u2}}},
    };

    const double width = svg::kPanelWidth * static_cast<double>(panels.size());
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg::num(width) << "\" height=\""
       << svg::num(svg::kPanelHeight) << "\" viewBox=\"0 0 " << svg::num(width) << ' '
       << svg::num(svg::kPanelHeight) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        svg::draw_panel(os, panels[i], svg::kPanelWidth * static_cast<double>(i));
    os << "</svg>\n";
}

}  // namespace gradflow
