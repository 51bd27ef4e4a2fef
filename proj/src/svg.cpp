#include "crf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "crf/errors.hpp"

namespace crf {

namespace {

// Heckbert's nice numbers for axis ticks
double nice_num(double x, bool round_down) {
    const double expv = std::floor(std::log10(x));
    const double f = x / std::pow(10.0, expv);
    double nf;
    if (round_down) {
        if (f < 1.5) nf = 1.0;
        else if (f < 3.0) nf = 2.0;
        else if (f < 7.0) nf = 5.0;
        else nf = 10.0;
    } else {
        if (f <= 1.0) nf = 1.0;
        else if (f <= 2.0) nf = 2.0;
        else if (f <= 5.0) nf = 5.0;
        else nf = 10.0;
    }
    return nf * std::pow(10.0, expv);
}

struct Ticks {
    double lo, hi, step;
};

Ticks make_ticks(double lo, double hi) {
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double range = nice_num(hi - lo, false);
    const double step = nice_num(range / 5.0, true);
    Ticks t;
    t.lo = std::floor(lo / step) * step;
    t.hi = std::ceil(hi / step) * step;
    t.step = step;
    return t;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
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

} // namespace

std::string render_plot(const PlotSpec& spec, const std::vector<Series>& series) {
    if (series.empty()) throw SpecError("render_plot: no series to draw");
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
    bool any = false;
    for (const Series& s : series) {
        for (const PlotPoint& pt : s.points) {
            if (!std::isfinite(pt.x) || !std::isfinite(pt.y))
                throw SpecError("render_plot: non-finite coordinate in series \"" +
                                s.label + "\"");
            if (!any) {
                x_min = x_max = pt.x;
                y_min = y_max = pt.y;
                any = true;
            } else {
                x_min = std::min(x_min, pt.x);
                x_max = std::max(x_max, pt.x);
                y_min = std::min(y_min, pt.y);
                y_max = std::max(y_max, pt.y);
            }
        }
    }
    if (!any) throw SpecError("render_plot: all series are empty");

    const Ticks tx = make_ticks(x_min, x_max);
    const Ticks ty = make_ticks(y_min, y_max);
    const double ml = 64, mr = 16, mt = spec.title.empty() ? 16 : 40, mb = 48;
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;
    auto px = [&](double x) { return ml + pw * (x - tx.lo) / (tx.hi - tx.lo); };
    auto py = [&](double y) { return mt + ph * (ty.hi - y) / (ty.hi - ty.lo); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
        << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width
        << " " << spec.height << "\">\n";
    svg << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        svg << "<text x=\"" << spec.width / 2.0
            << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
               " font-size=\"15\" fill=\"#222\">"
            << xml_escape(spec.title) << "</text>\n";

    // grid and ticks
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
    const int nx = static_cast<int>(std::lround((tx.hi - tx.lo) / tx.step));
    for (int i = 0; i <= nx; ++i) {
        const double x = tx.lo + i * tx.step;
        const double gx = px(x);
        svg << "<line x1=\"" << gx << "\" y1=\"" << mt << "\" x2=\"" << gx
            << "\" y2=\"" << mt + ph << "\" stroke=\"#e3e3e3\"/>\n";
        svg << "<text x=\"" << gx << "\" y=\"" << mt + ph + 16
            << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
    }
    const int ny = static_cast<int>(std::lround((ty.hi - ty.lo) / ty.step));
    for (int i = 0; i <= ny; ++i) {
        const double y = ty.lo + i * ty.step;
        const double gy = py(y);
        svg << "<line x1=\"" << ml << "\" y1=\"" << gy << "\" x2=\"" << ml + pw
            << "\" y2=\"" << gy << "\" stroke=\"#e3e3e3\"/>\n";
        svg << "<text x=\"" << ml - 6 << "\" y=\"" << gy + 4
            << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
    }
    svg << "</g>\n";

    // frame
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#555\"/>\n";

    // data
    for (const Series& s : series) {
        if (s.line && s.points.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.8\" points=\"";
            for (const PlotPoint& pt : s.points)
                svg << fmt(px(pt.x)) << ',' << fmt(py(pt.y)) << ' ';
            svg << "\"/>\n";
        }
        if (s.markers || s.points.size() == 1) {
            for (const PlotPoint& pt : s.points)
                svg << "<circle cx=\"" << fmt(px(pt.x)) << "\" cy=\""
                    << fmt(py(pt.y)) << "\" r=\"3\" fill=\"" << s.color
                    << "\"/>\n";
        }
    }

    // axis labels
    svg << "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"#222\">\n";
    if (!spec.xlabel.empty())
        svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 10
            << "\" text-anchor=\"middle\">" << xml_escape(spec.xlabel)
            << "</text>\n";
    if (!spec.ylabel.empty())
        svg << "<text x=\"16\" y=\"" << mt + ph / 2
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
            << mt + ph / 2 << ")\">" << xml_escape(spec.ylabel) << "</text>\n";
    svg << "</g>\n";

    // legend (only when labels exist)
    double ly = mt + 12;
    for (const Series& s : series) {
        if (s.label.empty()) continue;
        const double lx = ml + pw - 150;
        svg << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\""
            << lx + 24 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << lx + 30 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">"
            << xml_escape(s.label) << "</text>\n";
        ly += 16;
    }

    svg << "</svg>\n";
    return svg.str();
}

} // namespace crf
