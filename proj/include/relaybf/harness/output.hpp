// SPDX-License-Identifier: Apache-2.0
//
// relaybf: relay beamforming design and simulation toolkit
// Copyright (C) 2026 The relaybf authors
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

// CSV tables and minimal SVG line charts.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaybf::harness {

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string csv() const
    {
        std::ostringstream os;
        os << std::setprecision(10);
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << header[i];
        os << '\n';
        for (const auto &r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                os << (i ? "," : "") << r[i];
            os << '\n';
        }
        return os.str();
    }
};

inline void write_text(const std::filesystem::path &file, const std::string &text)
{
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    out << text;
    if (!out)
        throw std::runtime_error("write failed for " + file.string());
}

struct PlotStyle
{
    std::string title;
    bool logY = false;
    std::set<std::string> skip; // columns left out of the chart
};

/// Line chart of every column against the first one.
inline std::string svg_chart(const Table &t, const PlotStyle &style)
{
    constexpr double W = 640, H = 400, left = 70, right = 170, top = 40, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

    std::vector<std::size_t> cols;
    for (std::size_t c = 1; c < t.header.size(); ++c)
        if (!style.skip.count(t.header[c]))
            cols.push_back(c);

    auto ty = [&](double v) { return style.logY ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto &r : t.rows) {
        x0 = std::min(x0, r[0]);
        x1 = std::max(x1, r[0]);
        for (auto c : cols)
            if (std::isfinite(r[c]) && (!style.logY || r[c] > 0.0)) {
                y0 = std::min(y0, ty(r[c]));
                y1 = std::max(y1, ty(r[c]));
            }
    }
    if (!std::isfinite(x0)) {
        x0 = 0.0;
        x1 = 1.0;
    }
    if (!std::isfinite(y0)) {
        y0 = 0.0;
        y1 = 1.0;
    }
    if (x1 == x0)
        x1 = x0 + 1.0;
    if (y1 == y0)
        y1 = y0 + 1.0;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"15\">" << style.title << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\" "
           << "font-family=\"sans-serif\" font-size=\"11\">" << xv << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" "
           << "font-family=\"sans-serif\" font-size=\"11\">" << (style.logY ? std::pow(10.0, yv) : yv)
           << "</text>\n";
        os << "<line x1=\"" << left << "\" y1=\"" << py(yv) << "\" x2=\"" << left + pw << "\" y2=\"" << py(yv)
           << "\" stroke=\"#ddd\"/>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"12\">" << (t.header.empty() ? "" : t.header[0]) << "</text>\n";

    for (std::size_t s = 0; s < cols.size(); ++s) {
        const char *color = colors[s % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto &r : t.rows) {
            const double v = r[cols[s]];
            if (std::isfinite(v) && (!style.logY || v > 0.0))
                os << px(r[0]) << ',' << py(ty(v)) << ' ';
        }
        os << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(s);
        os << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\""
           << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" "
           << "font-size=\"11\">" << t.header[cols[s]] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// Writes base.csv and base.svg; returns both paths.
inline std::vector<std::filesystem::path> write_table(const std::filesystem::path &base, const Table &t,
                                                      const PlotStyle &style)
{
    std::filesystem::path csv = base, svg = base;
    csv += ".csv";
    svg += ".svg";
    write_text(csv, t.csv());
    write_text(svg, svg_chart(t, style));
    return {csv, svg};
}

} // namespace relaybf::harness
