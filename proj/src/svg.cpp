#include "unireg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

namespace unireg {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 220.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kPanelGap = 50.0;
constexpr std::size_t kMaxPoints = 4000;

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Keeps at most kMaxPoints evenly strided samples.
std::vector<std::pair<double, double>> decimate(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() <= kMaxPoints) {
        return pts;
    }
    std::vector<std::pair<double, double>> out;
    const double stride = static_cast<double>(pts.size()) / static_cast<double>(kMaxPoints);
    for (std::size_t i = 0; i < kMaxPoints; ++i) {
        out.push_back(pts[static_cast<std::size_t>(static_cast<double>(i) * stride)]);
    }
    out.push_back(pts.back());
    return out;
}

void panel(std::ostream& out, double top, const std::string& title, const std::string& x_label,
           const std::vector<Series>& series) {
    Range xr, yr;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            xr.include(x);
            yr.include(y);
        }
    }
    xr.pad();
    yr.pad();
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kPanelHeight;
    auto sx = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto sy = [&](double y) { return top + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#888\"/>\n";
    out << "<text x=\"" << kMarginLeft << "\" y=\"" << top - 8 << "\" font-size=\"13\">" << title
        << "</text>\n";
    out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << top + plot_h + 28
        << "\" font-size=\"11\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << top + 10
        << "\" font-size=\"10\" text-anchor=\"end\">" << num(yr.hi) << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << top + plot_h
        << "\" font-size=\"10\" text-anchor=\"end\">" << num(yr.lo) << "</text>\n";
    out << "<text x=\"" << kMarginLeft << "\" y=\"" << top + plot_h + 14
        << "\" font-size=\"10\">" << num(xr.lo) << "</text>\n";
    out << "<text x=\"" << kMarginLeft + plot_w << "\" y=\"" << top + plot_h + 14
        << "\" font-size=\"10\" text-anchor=\"end\">" << num(xr.hi) << "</text>\n";

    double legend_x = kMarginLeft + plot_w - 10;
    for (auto it = series.rbegin(); it != series.rend(); ++it) {
        out << "<text x=\"" << legend_x << "\" y=\"" << top + 14 << "\" font-size=\"11\" fill=\""
            << it->color << "\" text-anchor=\"end\">" << it->label << "</text>\n";
        legend_x -= 12.0 + 7.0 * static_cast<double>(it->label.size());
    }
    for (const auto& s : series) {
        if (s.points.empty()) {
            continue;
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1\" points=\"";
        for (auto [x, y] : decimate(s.points)) {
            out << num(sx(x)) << ',' << num(sy(y)) << ' ';
        }
        out << "\"/>\n";
    }
}

}  // namespace

void write_session_svg(std::ostream& out, const std::vector<EpisodeLog>& logs,
                       const std::string& title) {
    Series reference{"r", "#1f77b4", {}};
    Series state{"x", "#d62728", {}};
    Series control{"u", "#2ca02c", {}};
    Series feedback{"K", "#9467bd", {}};
    Series feedforward{"N", "#ff7f0e", {}};
    for (const auto& log : logs) {
        for (const auto& rec : log.records) {
            reference.points.emplace_back(rec.t, rec.r);
            state.points.emplace_back(rec.t, rec.x);
            control.points.emplace_back(rec.t, rec.u);
        }
        feedback.points.emplace_back(log.episode, log.final_gains.K);
        feedforward.points.emplace_back(log.episode, log.final_gains.N);
    }

    const double height = kMarginTop + 3 * kPanelHeight + 3 * kPanelGap;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">"
        << escape(title) << "</text>\n";
    double top = kMarginTop + 10;
    panel(out, top, "Response", "t [s]", {reference, state});
    top += kPanelHeight + kPanelGap;
    panel(out, top, "Regulator output", "t [s]", {control});
    top += kPanelHeight + kPanelGap;
    panel(out, top, "Gains at episode end", "episode", {feedback, feedforward});
    out << "</svg>\n";
}

}  // namespace unireg
