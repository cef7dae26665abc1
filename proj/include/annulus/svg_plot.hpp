#ifndef ANNULUS_SVG_PLOT_HPP
#define ANNULUS_SVG_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "annulus/radial_profile.hpp"

namespace annulus {

/*
 * Static SVG profile plot of a solution: u(r), v(r), |grad u|(r),
 * |grad v|(r) over the annulus radius, two panels (values above,
 * gradient magnitudes below).
 */
namespace detail {

struct SvgSeries {
    const char* label;
    const char* color;
    std::vector<double> y;
};

inline void svg_panel(std::string& out, const std::vector<double>& x,
                      const std::vector<SvgSeries>& series, double px, double py,
                      double pw, double ph, const char* ylabel)
{
    double xmin = x.front(), xmax = x.front();
    for (double v : x) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    double ymin = series[0].y.front(), ymax = ymin;
    for (const auto& s : series)
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (ymax - ymin < 1e-12) {
        ymax += 1.0;
        ymin -= 1.0;
    }
    const double pad = 0.06 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    char buf[256];
    auto X = [&](double v) { return px + (v - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double v) { return py + ph - (v - ymin) / (ymax - ymin) * ph; };

    std::snprintf(buf, sizeof buf,
                  "<rect x='%.1f' y='%.1f' width='%.1f' height='%.1f' fill='white' "
                  "stroke='#888'/>\n",
                  px, py, pw, ph);
    out += buf;
    // ticks
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#ddd'/>\n",
                      X(xv), py, X(xv), py + ph);
        out += buf;
        std::snprintf(buf, sizeof buf,
                      "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#ddd'/>\n",
                      px, Y(yv), px + pw, Y(yv));
        out += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x='%.1f' y='%.1f' font-size='11' text-anchor='middle' "
                      "fill='#444'>%.4g</text>\n",
                      X(xv), py + ph + 14.0, xv);
        out += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x='%.1f' y='%.1f' font-size='11' text-anchor='end' "
                      "fill='#444'>%.4g</text>\n",
                      px - 4.0, Y(yv) + 4.0, yv);
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x='%.1f' y='%.1f' font-size='12' fill='#222'>%s</text>\n", px,
                  py - 6.0, ylabel);
    out += buf;

    double lx = px + 8.0;
    for (const auto& s : series) {
        out += "<polyline fill='none' stroke='";
        out += s.color;
        out += "' stroke-width='1.5' points='";
        for (std::size_t j = 0; j < x.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(x[j]), Y(s.y[j]));
            out += buf;
        }
        out += "'/>\n";
        std::snprintf(buf, sizeof buf,
                      "<rect x='%.1f' y='%.1f' width='10' height='3' fill='%s'/>"
                      "<text x='%.1f' y='%.1f' font-size='11' fill='#222'>%s</text>\n",
                      lx, py + 8.0, s.color, lx + 14.0, py + 13.0, s.label);
        out += buf;
        lx += 90.0;
    }
}

} // namespace detail

inline void write_solution_svg(std::ostream& os, const RadialProfile& prof,
                               const std::string& title)
{
    std::vector<double> r;
    detail::SvgSeries su{"u(r)", "#1f77b4", {}};
    detail::SvgSeries sv{"v(r)", "#d62728", {}};
    detail::SvgSeries gu{"|grad u|", "#2ca02c", {}};
    detail::SvgSeries gv{"|grad v|", "#9467bd", {}};
    for (const RadialProfileRow& row : prof.rows) {
        r.push_back(row.r);
        su.y.push_back(row.u);
        sv.y.push_back(row.v);
        gu.y.push_back(row.grad_u);
        gv.y.push_back(row.grad_v);
    }

    std::string body;
    body += "<svg xmlns='http://www.w3.org/2000/svg' width='900' height='620' "
            "viewBox='0 0 900 620'>\n";
    body += "<rect width='900' height='620' fill='#fafafa'/>\n";
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<text x='450' y='22' font-size='15' text-anchor='middle' "
                  "fill='#111'>%s</text>\n",
                  title.c_str());
    body += buf;
    detail::svg_panel(body, r, {su, sv}, 70, 50, 790, 230, "component values over r");
    detail::svg_panel(body, r, {gu, gv}, 70, 340, 790, 230, "gradient magnitudes over r");
    body += "<text x='450' y='612' font-size='12' text-anchor='middle' "
            "fill='#444'>r</text>\n";
    body += "</svg>\n";
    os << body;
}

} // namespace annulus

#endif
