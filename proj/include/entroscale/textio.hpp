#pragma once

#include <string>
#include <vector>

#include "entroscale/matrix.hpp"

namespace entroscale::cli {

// Fixed 17-significant-digit rendering ("%.17g"). Not the shortest
// representation, but the same bytes on every platform.
std::string format_g17(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> footer_comments; // emitted as "# ..." lines

    void add_row(std::vector<std::string> row);
    std::string render() const; // '\n' line endings, comma separated
};

// Throws IoError naming the path.
void write_text_file(const std::string& path, const std::string& content);
void write_binary_file(const std::string& path, const std::string& content);

// Plain PGM (P2). Values are min-max normalized to 0..255; a flat image
// renders mid-gray.
std::string render_pgm(const Matrix& img);

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
    bool has_fit = false;
    double fit_slope = 0.0;
    double fit_intercept = 0.0;
};

// Minimal line chart: axes, 5 ticks per axis, one polyline per series plus
// optional dashed fit lines. Fixed-format coordinates keep the bytes stable.
std::string render_svg_chart(const std::string& x_label, const std::string& y_label,
                             const std::vector<SvgSeries>& series);

} // namespace entroscale::cli
