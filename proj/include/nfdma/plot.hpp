// SPDX-License-Identifier: Apache-2.0
//
// nfdma: near-field localization with dynamic metasurface antennas
// Copyright (C) 2026 The nfdma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#ifndef NFDMA_PLOT_HPP
#define NFDMA_PLOT_HPP

// Static SVG renderings of the experiment CSVs

#include "nfdma/experiment.hpp"

#include <map>
#include <set>
#include <sstream>

namespace nfdma
{
    namespace detail
    {
        inline std::string svg_num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            return buf;
        }

        inline void write_text_file(const std::filesystem::path &p, const std::string &body)
        {
            auto f = open_out(p);
            f << body;
            close_checked(f, p);
        }

        // Piecewise-linear approximation of the viridis map, t in [0, 1]
        inline std::string viridis(double t)
        {
            static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                                          {59, 82, 139},
                                                                          {33, 145, 140},
                                                                          {94, 201, 98},
                                                                          {253, 231, 37}}};
            t = std::clamp(t, 0.0, 1.0) * double(stops.size() - 1);
            const auto i = std::min<std::size_t>(std::size_t(t), stops.size() - 2);
            const double w = t - double(i);
            char buf[16];
            std::snprintf(buf, sizeof buf, "#%02x%02x%02x", int(std::lround(stops[i][0] * (1 - w) + stops[i + 1][0] * w)),
                          int(std::lround(stops[i][1] * (1 - w) + stops[i + 1][1] * w)),
                          int(std::lround(stops[i][2] * (1 - w) + stops[i + 1][2] * w)));
            return buf;
        }
    }

    // RMSE against SNR, one polyline per scheme, logarithmic y axis
    inline void render_rmse_plot(std::span<const aggregate_row> rows, const std::filesystem::path &out)
    {
        constexpr double W = 640, H = 440, L = 70, R = 190, T = 30, B = 50;
        std::map<scheme, std::vector<std::pair<double, double>>> series;
        double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
        for (const auto &r : rows)
        {
            if (!std::isfinite(r.snr_db) || !(r.rmse_m > 0.0))
                continue;
            series[r.method].emplace_back(r.snr_db, r.rmse_m);
            xmin = std::min(xmin, r.snr_db);
            xmax = std::max(xmax, r.snr_db);
            ymin = std::min(ymin, r.rmse_m);
            ymax = std::max(ymax, r.rmse_m);
        }
        if (series.empty())
            throw estimation_failure("no finite RMSE values to plot");
        if (xmax == xmin)
            xmax = xmin + 1.0;
        const double ly0 = std::floor(std::log10(ymin)), ly1 = std::max(ly0 + 1.0, std::ceil(std::log10(ymax)));
        auto px = [&](double x)
        { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
        auto py = [&](double y)
        { return H - B - (std::log10(y) - ly0) / (ly1 - ly0) * (H - T - B); };

        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
          << "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        for (double e = ly0; e <= ly1; e += 1.0)
        {
            const double y = py(std::pow(10.0, e));
            s << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << detail::svg_num(y) << "\" y2=\""
              << detail::svg_num(y) << "\" stroke=\"#ddd\"/>\n<text x=\"" << L - 6 << "\" y=\"" << detail::svg_num(y + 4)
              << "\" text-anchor=\"end\">1e" << int(e) << "</text>\n";
        }
        std::set<double> ticks;
        for (const auto &[k, pts] : series)
            for (const auto &p : pts)
                ticks.insert(p.first);
        for (double x : ticks)
            s << "<text x=\"" << detail::svg_num(px(x)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
              << format_number(x) << "</text>\n";
        s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
          << "\" fill=\"none\" stroke=\"black\"/>\n"
          << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">SNR (dB)</text>\n"
          << "<text transform=\"translate(16," << (T + H - B) / 2
          << ") rotate(-90)\" text-anchor=\"middle\">RMSE (m)</text>\n";

        static constexpr std::array colors{"#1f77b4", "#d62728", "#ff7f0e", "#2ca02c", "#9467bd"};
        std::size_t idx = 0;
        for (auto &[k, pts] : series)
        {
            std::ranges::sort(pts);
            const char *c = colors[std::size_t(k) % colors.size()];
            s << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
            for (const auto &[x, y] : pts)
                s << detail::svg_num(px(x)) << ',' << detail::svg_num(py(y)) << ' ';
            s << "\"/>\n";
            for (const auto &[x, y] : pts)
                s << "<circle cx=\"" << detail::svg_num(px(x)) << "\" cy=\"" << detail::svg_num(py(y))
                  << "\" r=\"3\" fill=\"" << c << "\"/>\n";
            const double ly = T + 14 + 20.0 * double(idx++);
            s << "<line x1=\"" << W - R + 12 << "\" x2=\"" << W - R + 36 << "\" y1=\"" << ly << "\" y2=\"" << ly
              << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4
              << "\">" << to_string(k) << "</text>\n";
        }
        s << "</svg>\n";
        detail::write_text_file(out, s.str());
    }

    // Per-cell RMSE raster on a log color scale; missing cells are drawn grey
    inline void render_heatmap(const heatmap_csv &h, const std::filesystem::path &out)
    {
        std::set<double> xs, ys;
        double lo = INFINITY, hi = -INFINITY;
        for (const auto &c : h.cells)
        {
            xs.insert(c.x_m);
            ys.insert(c.y_m);
            if (std::isfinite(c.rmse_m) && c.rmse_m > 0.0)
            {
                lo = std::min(lo, c.rmse_m);
                hi = std::max(hi, c.rmse_m);
            }
        }
        if (xs.empty())
            throw estimation_failure("heatmap has no cells");
        if (!(hi >= lo))
            lo = hi = 1.0;
        const double llo = std::log10(lo), lhi = std::max(std::log10(hi), llo + 1e-12);
        const std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
        constexpr double side = 480, L = 60, T = 30, B = 50, bar = 110;
        const double cw = side / double(xv.size()), chh = side / double(yv.size());
        auto ix = [&](double x)
        { return double(std::ranges::lower_bound(xv, x) - xv.begin()); };
        auto iy = [&](double y)
        { return double(std::ranges::lower_bound(yv, y) - yv.begin()); };

        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << L + side + bar << "\" height=\"" << T + side + B
          << "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
          << "<text x=\"" << L << "\" y=\"18\">" << h.scenario << ": RMSE (m) by initial position</text>\n";
        for (const auto &c : h.cells)
        {
            const bool ok = std::isfinite(c.rmse_m) && c.rmse_m > 0.0;
            const std::string fill = ok ? detail::viridis((std::log10(c.rmse_m) - llo) / (lhi - llo)) : "#bbbbbb";
            s << "<rect x=\"" << detail::svg_num(L + ix(c.x_m) * cw) << "\" y=\""
              << detail::svg_num(T + side - (iy(c.y_m) + 1) * chh) << "\" width=\"" << detail::svg_num(cw + 0.3)
              << "\" height=\"" << detail::svg_num(chh + 0.3) << "\" fill=\"" << fill << "\"/>\n";
        }
        s << "<text x=\"" << L + side / 2 << "\" y=\"" << T + side + 36 << "\" text-anchor=\"middle\">x (m), "
          << format_number(xv.front()) << " to " << format_number(xv.back()) << "</text>\n"
          << "<text transform=\"translate(20," << T + side / 2 << ") rotate(-90)\" text-anchor=\"middle\">y (m), "
          << format_number(yv.front()) << " to " << format_number(yv.back()) << "</text>\n";
        for (int i = 0; i <= 10; ++i)
        {
            const double t = i / 10.0;
            s << "<rect x=\"" << L + side + 20 << "\" y=\"" << detail::svg_num(T + side - (t + 0.1) * side * 10 / 11)
              << "\" width=\"20\" height=\"" << detail::svg_num(side / 11 + 0.3) << "\" fill=\"" << detail::viridis(t)
              << "\"/>\n";
        }
        s << "<text x=\"" << L + side + 46 << "\" y=\"" << T + 10 << "\">" << detail::svg_num(hi) << "</text>\n"
          << "<text x=\"" << L + side + 46 << "\" y=\"" << T + side << "\">" << detail::svg_num(lo) << "</text>\n"
          << "</svg>\n";
        detail::write_text_file(out, s.str());
    }
}

#endif
