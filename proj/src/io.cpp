#include "sim/io.hpp"

#include "sim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sim {

std::string formatDouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string CsvTable::toString() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) os << ',';
        os << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << formatDouble(row[i]);
        }
        os << '\n';
    }
    return os.str();
}

void writeTextFile(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << contents;
    if (!out) throw ConfigError("write failed: " + path);
}

namespace {

const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#7f7f7f",
                           "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

struct Ticks {
    std::vector<double> values;
};

Ticks niceTicks(double lo, double hi) {
    if (hi <= lo) hi = lo + 1.0;
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    Ticks t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step)
        t.values.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return t;
}

} // namespace

std::string renderLinePlot(const std::string& title, const std::string& xLabel,
                           const std::vector<PlotSeries>& series) {
    if (series.empty() || series.size() > 8)
        throw ConfigError("renderLinePlot: between 1 and 8 series required");
    const int width = 900, height = 560;
    const int left = 70, right = 160, top = 46, bottom = 56;
    const double plotW = width - left - right;
    const double plotH = height - top - bottom;

    double xLo = 1e300, xHi = -1e300, yLo = 1e300, yHi = -1e300;
    for (const auto& s : series) {
        for (double v : *s.x) {
            xLo = std::min(xLo, v);
            xHi = std::max(xHi, v);
        }
        for (double v : *s.y) {
            yLo = std::min(yLo, v);
            yHi = std::max(yHi, v);
        }
    }
    if (yLo > 0) yLo = 0;
    const double yPad = 0.05 * (yHi - yLo + 1e-12);
    yHi += yPad;

    auto px = [&](double x) { return left + (x - xLo) / (xHi - xLo) * plotW; };
    auto py = [&](double y) { return top + plotH - (y - yLo) / (yHi - yLo) * plotH; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
          "font-family=\"sans-serif\">"
       << title << "</text>\n";

    for (double v : niceTicks(xLo, xHi).values) {
        const double x = px(v);
        os << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\""
           << top + plotH << "\" stroke=\"#e0e0e0\"/>\n"
           << "<text x=\"" << x << "\" y=\"" << top + plotH + 18
           << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
           << formatDouble(v) << "</text>\n";
    }
    for (double v : niceTicks(yLo, yHi).values) {
        const double y = py(v);
        os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plotW
           << "\" y2=\"" << y << "\" stroke=\"#e0e0e0\"/>\n"
           << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
           << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
           << formatDouble(v) << "</text>\n";
    }
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plotW << "\" height=\""
       << plotH << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<text x=\"" << left + plotW / 2 << "\" y=\"" << height - 14
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xLabel
       << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        os << "<polyline fill=\"none\" stroke=\"" << kPalette[k] << "\" stroke-width=\"1.5\" points=\"";
        const std::size_t n = std::min(s.x->size(), s.y->size());
        for (std::size_t i = 0; i < n; ++i)
            os << px((*s.x)[i]) << ',' << py((*s.y)[i]) << ' ';
        os << "\"/>\n";
        const double ly = top + 16 + 18.0 * k;
        os << "<line x1=\"" << left + plotW + 10 << "\" y1=\"" << ly << "\" x2=\""
           << left + plotW + 34 << "\" y2=\"" << ly << "\" stroke=\"" << kPalette[k]
           << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << left + plotW + 40 << "\" y=\"" << ly + 4
           << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace sim
