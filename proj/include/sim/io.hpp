#pragma once

#include <string>
#include <vector>

namespace sim {

/// Formats a double with enough digits to round-trip reproducibly.
std::string formatDouble(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string toString() const;
};

void writeTextFile(const std::string& path, const std::string& contents);

struct PlotSeries {
    std::string name;
    const std::vector<double>* x = nullptr;
    const std::vector<double>* y = nullptr;
};

/// Minimal self-contained SVG line plot (axes, ticks, legend; up to 8 series).
std::string renderLinePlot(const std::string& title, const std::string& xLabel,
                           const std::vector<PlotSeries>& series);

} // namespace sim
