#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "blsd/optimizer.hpp"

namespace blsd {

struct TraceSeries {
    std::string label;
    std::vector<TraceRecord> records;
};

struct PlotOptions {
    bool log_scale = false; // log10 objective axis; nonpositive points are skipped
    int window = 0;         // trailing-mean width; 0 infers the component count
};

namespace detail {

inline std::string svgnum(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string ticklabel(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5g", v);
    return buf;
}

struct SeriesPoints {
    std::string label;
    std::vector<double> k, elapsed, mean;          // trailing-mean path
    std::vector<double> fk, felapsed, fvalue;      // full-objective markers
};

inline int infer_window(const std::vector<TraceSeries>& traces) {
    int w = 1;
    for (const auto& t : traces)
        for (const auto& r : t.records) w = std::max(w, r.j);
    return w;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % (sizeof colors / sizeof colors[0])];
}

} // namespace detail

/// Two-panel convergence figure: the trailing mini-batch mean scaled by
/// the window (an epoch estimate of the full objective) against
/// iteration count and against wall time, one polyline per trace, with
/// the periodically logged full objective overlaid as markers on the
/// same scale. Pure function of its inputs, so re-rendering the same
/// traces is byte-identical.
inline std::string render_convergence_svg(const std::vector<TraceSeries>& traces,
                                          const PlotOptions& opts = {}) {
    using detail::svgnum;
    using detail::ticklabel;
    if (traces.empty()) throw std::invalid_argument("render_convergence_svg: no traces");

    const int window = opts.window > 0 ? opts.window : detail::infer_window(traces);
    std::vector<detail::SeriesPoints> series;
    for (const auto& t : traces) {
        detail::SeriesPoints sp;
        sp.label = t.label;
        double acc = 0.0;
        std::vector<double> ring;
        for (const auto& r : t.records) {
            ring.push_back(r.fj_after);
            acc += r.fj_after;
            if (static_cast<int>(ring.size()) > window) {
                acc -= ring[ring.size() - window - 1];
            }
            const int n = std::min<int>(window, static_cast<int>(ring.size()));
            sp.k.push_back(static_cast<double>(r.k));
            sp.elapsed.push_back(r.elapsed_s);
            sp.mean.push_back(window * acc / n); // epoch estimate of the full objective
            if (r.full_f) {
                sp.fk.push_back(static_cast<double>(r.k));
                sp.felapsed.push_back(r.elapsed_s);
                sp.fvalue.push_back(*r.full_f);
            }
        }
        if (!sp.k.empty()) series.push_back(std::move(sp));
    }
    if (series.empty()) throw std::invalid_argument("render_convergence_svg: traces are empty");

    const auto usable = [&](double y) { return !opts.log_scale || y > 0.0; };
    const auto transform = [&](double y) { return opts.log_scale ? std::log10(y) : y; };

    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    double kmax = 1.0, emax = 0.0;
    for (const auto& sp : series) {
        for (std::size_t i = 0; i < sp.k.size(); ++i) {
            kmax = std::max(kmax, sp.k[i]);
            emax = std::max(emax, sp.elapsed[i]);
            if (usable(sp.mean[i])) {
                ymin = std::min(ymin, transform(sp.mean[i]));
                ymax = std::max(ymax, transform(sp.mean[i]));
            }
        }
        for (std::size_t i = 0; i < sp.fvalue.size(); ++i)
            if (usable(sp.fvalue[i])) {
                ymin = std::min(ymin, transform(sp.fvalue[i]));
                ymax = std::max(ymax, transform(sp.fvalue[i]));
            }
    }
    if (!(ymin <= ymax))
        throw std::invalid_argument("render_convergence_svg: no plottable points (log scale "
                                    "requires positive objective values)");
    if (ymax - ymin < 1e-12) {
        ymin -= 1.0;
        ymax += 1.0;
    } else {
        const double pad = 0.04 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    if (emax <= 0.0) emax = 1.0;

    // layout
    const double W = 980, H = 440, top = 50, bottom = 45, ph = H - top - bottom;
    const double p1x = 60, p2x = 560, pw = 380;
    const auto map_y = [&](double y) { return top + ph * (ymax - transform(y)) / (ymax - ymin); };
    const auto map_x1 = [&](double k) { return p1x + pw * (k - 1.0) / std::max(kmax - 1.0, 1.0); };
    const auto map_x2 = [&](double e) { return p2x + pw * e / emax; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    const char* ylab = opts.log_scale ? "objective (log scale)" : "objective";
    const std::string titles[2] = {"trailing-epoch objective vs iteration",
                                   std::string("trailing-epoch ") + ylab + " vs time (s)"};
    const double panel_x[2] = {p1x, p2x};
    for (int p = 0; p < 2; ++p) {
        svg << "<rect x=\"" << svgnum(panel_x[p]) << "\" y=\"" << svgnum(top) << "\" width=\""
            << svgnum(pw) << "\" height=\"" << svgnum(ph)
            << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << svgnum(panel_x[p] + pw / 2) << "\" y=\"" << svgnum(top - 8)
            << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
            << titles[p] << "</text>\n";
        // y ticks and grid
        for (int i = 0; i <= 4; ++i) {
            const double yv = ymin + (ymax - ymin) * i / 4.0;
            const double ypix = top + ph * (ymax - yv) / (ymax - ymin);
            svg << "<line x1=\"" << svgnum(panel_x[p]) << "\" y1=\"" << svgnum(ypix) << "\" x2=\""
                << svgnum(panel_x[p] + pw) << "\" y2=\"" << svgnum(ypix)
                << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
            const double shown = opts.log_scale ? std::pow(10.0, yv) : yv;
            svg << "<text x=\"" << svgnum(panel_x[p] - 5) << "\" y=\"" << svgnum(ypix + 4)
                << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
                << ticklabel(shown) << "</text>\n";
        }
        // x ticks
        for (int i = 0; i <= 4; ++i) {
            const double frac = i / 4.0;
            const double xv = p == 0 ? 1.0 + (kmax - 1.0) * frac : emax * frac;
            const double xpix = panel_x[p] + pw * frac;
            svg << "<line x1=\"" << svgnum(xpix) << "\" y1=\"" << svgnum(top + ph) << "\" x2=\""
                << svgnum(xpix) << "\" y2=\"" << svgnum(top + ph + 4)
                << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
            svg << "<text x=\"" << svgnum(xpix) << "\" y=\"" << svgnum(top + ph + 16)
                << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
                << ticklabel(xv) << "</text>\n";
        }
        svg << "<text x=\"" << svgnum(panel_x[p] + pw / 2) << "\" y=\"" << svgnum(H - 12)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << (p == 0 ? "iteration" : "elapsed seconds") << "</text>\n";
    }

    // polylines, split where log scale drops points
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& sp = series[s];
        const char* color = detail::palette(s);
        for (int p = 0; p < 2; ++p) {
            std::vector<std::string> segment;
            const auto flush = [&]() {
                if (segment.size() == 1)
                    svg << "<circle cx=\"" << segment[0].substr(0, segment[0].find(','))
                        << "\" cy=\"" << segment[0].substr(segment[0].find(',') + 1)
                        << "\" r=\"1.5\" fill=\"" << color << "\"/>\n";
                else if (segment.size() > 1) {
                    svg << "<polyline fill=\"none\" stroke=\"" << color
                        << "\" stroke-width=\"1.5\" points=\"";
                    for (std::size_t i = 0; i < segment.size(); ++i)
                        svg << (i ? " " : "") << segment[i];
                    svg << "\"/>\n";
                }
                segment.clear();
            };
            for (std::size_t i = 0; i < sp.k.size(); ++i) {
                if (!usable(sp.mean[i])) {
                    flush();
                    continue;
                }
                const double x = p == 0 ? map_x1(sp.k[i]) : map_x2(sp.elapsed[i]);
                segment.push_back(svgnum(x) + "," + svgnum(map_y(sp.mean[i])));
            }
            flush();
            for (std::size_t i = 0; i < sp.fvalue.size(); ++i) {
                if (!usable(sp.fvalue[i])) continue;
                const double x = p == 0 ? map_x1(sp.fk[i]) : map_x2(sp.felapsed[i]);
                svg << "<circle cx=\"" << svgnum(x) << "\" cy=\"" << svgnum(map_y(sp.fvalue[i]))
                    << "\" r=\"2.5\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
            }
        }
    }

    // legend across the top
    double lx = p1x;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = detail::palette(s);
        svg << "<line x1=\"" << svgnum(lx) << "\" y1=\"18\" x2=\"" << svgnum(lx + 22)
            << "\" y2=\"18\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << svgnum(lx + 27) << "\" y=\"22\" font-family=\"sans-serif\" "
            << "font-size=\"12\">" << series[s].label << "</text>\n";
        lx += 40.0 + 7.5 * static_cast<double>(series[s].label.size());
    }

    svg << "</svg>\n";
    return svg.str();
}

inline void write_convergence_plot(const std::vector<TraceSeries>& traces,
                                   const PlotOptions& opts, const std::string& path) {
    const std::string svg = render_convergence_svg(traces, opts);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open plot for writing: " + path);
    out << svg;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace blsd
