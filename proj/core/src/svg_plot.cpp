#include "acrelax/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace acrelax {
namespace {

constexpr double kWidth = 900, kHeight = 480;
constexpr double kLeft = 80, kRight = 170, kTop = 50, kBottom = 70;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

struct Frame {
    double lo = 0, hi = 1;
    double plot_w = kWidth - kLeft - kRight;
    double plot_h = kHeight - kTop - kBottom;

    double y(double v) const { return kTop + plot_h * (hi - v) / (hi - lo); }
};

Frame make_frame(const Chart& c, bool include_zero) {
    Frame f;
    bool any = false;
    double lo = 0, hi = 0;
    for (const auto& s : c.series)
        for (double v : s.values)
            if (std::isfinite(v)) {
                lo = any ? std::min(lo, v) : v;
                hi = any ? std::max(hi, v) : v;
                any = true;
            }
    if (include_zero || !any) {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
    }
    if (hi - lo < 1e-12) {
        hi += 1.0;
        lo -= include_zero && lo == 0.0 ? 0.0 : 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    f.lo = lo < 0 ? lo - pad : lo;
    f.hi = hi + pad;
    return f;
}

void header(std::ostringstream& o, const Chart& c, const Frame& f) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(c.title)
      << "</text>\n";
    o << "<text x=\"" << kLeft + f.plot_w / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
      << escape(c.x_label) << "</text>\n";
    o << "<text transform=\"translate(20," << kTop + f.plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(c.y_label) << "</text>\n";
    for (int k = 0; k <= 5; ++k) {
        const double v = f.lo + (f.hi - f.lo) * k / 5.0;
        const double y = f.y(v);
        o << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + f.plot_w << "\" y2=\"" << y
          << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    }
    o << "<line x1=\"" << kLeft << "\" y1=\"" << f.y(std::clamp(0.0, f.lo, f.hi)) << "\" x2=\"" << kLeft + f.plot_w
      << "\" y2=\"" << f.y(std::clamp(0.0, f.lo, f.hi)) << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + f.plot_h
      << "\" stroke=\"black\"/>\n";
}

void legend_and_close(std::ostringstream& o, const Chart& c) {
    const double x = kWidth - kRight + 15;
    for (std::size_t s = 0; s < c.series.size(); ++s) {
        const double y = kTop + 10 + 18.0 * s;
        o << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
          << kPalette[s % 10] << "\"/>\n";
        o << "<text x=\"" << x + 18 << "\" y=\"" << y + 2 << "\">" << escape(c.series[s].label) << "</text>\n";
    }
    o << "</svg>\n";
}

void category_labels(std::ostringstream& o, const Chart& c, const Frame& f, double slot) {
    // thin out labels on wide charts
    const std::size_t every = std::max<std::size_t>(1, c.categories.size() / 40 + 1);
    for (std::size_t k = 0; k < c.categories.size(); k += every) {
        const double x = kLeft + slot * (k + 0.5);
        o << "<text x=\"" << x << "\" y=\"" << kTop + f.plot_h + 16 << "\" text-anchor=\"middle\">"
          << escape(c.categories[k]) << "</text>\n";
    }
}

}  // namespace

std::string render_grouped_bars(const Chart& c) {
    std::ostringstream o;
    const Frame f = make_frame(c, true);
    header(o, c, f);
    const std::size_t n = std::max<std::size_t>(1, c.categories.size());
    const double slot = f.plot_w / n;
    const double bar = 0.8 * slot / std::max<std::size_t>(1, c.series.size());
    const double base = f.y(std::clamp(0.0, f.lo, f.hi));
    for (std::size_t s = 0; s < c.series.size(); ++s) {
        const auto& vals = c.series[s].values;
        for (std::size_t k = 0; k < vals.size() && k < n; ++k) {
            if (!std::isfinite(vals[k])) continue;
            const double x = kLeft + slot * k + 0.1 * slot + bar * s;
            const double y = f.y(vals[k]);
            o << "<rect x=\"" << x << "\" y=\"" << std::min(y, base) << "\" width=\"" << bar << "\" height=\""
              << std::abs(base - y) << "\" fill=\"" << kPalette[s % 10] << "\"><title>" << escape(c.series[s].label)
              << ' ' << escape(c.categories[k]) << ": " << fmt(vals[k]) << "</title></rect>\n";
        }
    }
    category_labels(o, c, f, slot);
    legend_and_close(o, c);
    return o.str();
}

std::string render_lines(const Chart& c) {
    std::ostringstream o;
    const Frame f = make_frame(c, false);
    header(o, c, f);
    const std::size_t n = std::max<std::size_t>(1, c.categories.size());
    const double slot = f.plot_w / n;
    for (std::size_t s = 0; s < c.series.size(); ++s) {
        const auto& vals = c.series[s].values;
        std::string path;
        for (std::size_t k = 0; k < vals.size() && k < n; ++k) {
            if (!std::isfinite(vals[k])) continue;
            const double x = kLeft + slot * (k + 0.5);
            const double y = f.y(vals[k]);
            path += (path.empty() ? "M" : " L") + fmt(x) + ',' + fmt(y);
            o << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"" << kPalette[s % 10] << "\"/>\n";
        }
        if (!path.empty())
            o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << kPalette[s % 10]
              << "\" stroke-width=\"2\"/>\n";
    }
    category_labels(o, c, f, slot);
    legend_and_close(o, c);
    return o.str();
}

}  // namespace acrelax
