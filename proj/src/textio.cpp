#include "entroscale/textio.hpp"

#include <cstdio>
#include <fstream>
#include <limits>

#include "entroscale/error.hpp"

namespace entroscale::cli {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

std::string CsvTable::render() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    for (const auto& c : footer_comments) {
        out += "# ";
        out += c;
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary); // binary: keep '\n' as-is
    if (!out) throw Error(ErrorCode::IoError, "cannot open for writing: " + path);
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "failed writing: " + path);
}

void write_binary_file(const std::string& path, const std::string& content) {
    write_text_file(path, content);
}

std::string render_pgm(const Matrix& img) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < img.size(); ++i) {
        double v = img.data()[i];
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    double span = hi - lo;
    std::string out = "P2\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) +
                      "\n255\n";
    for (std::size_t r = 0; r < img.rows(); ++r) {
        for (std::size_t c = 0; c < img.cols(); ++c) {
            int v = span > 0.0 ? int((img(r, c) - lo) / span * 255.0 + 0.5) : 128;
            if (v < 0) v = 0;
            if (v > 255) v = 255;
            if (c) out += ' ';
            out += std::to_string(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

std::string render_svg_chart(const std::string& x_label, const std::string& y_label,
                             const std::vector<SvgSeries>& series) {
    constexpr double kW = 640, kH = 480;
    constexpr double kL = 70, kR = 20, kT = 20, kB = 50;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            } else {
                if (x < xmin) xmin = x;
                if (x > xmax) xmax = x;
                if (y < ymin) ymin = y;
                if (y > ymax) ymax = y;
            }
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * (kW - kL - kR); };
    auto py = [&](double y) { return kH - kB - (y - ymin) / (ymax - ymin) * (kH - kT - kB); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    svg += "<line x1=\"" + fmt2(kL) + "\" y1=\"" + fmt2(kH - kB) + "\" x2=\"" + fmt2(kW - kR) +
           "\" y2=\"" + fmt2(kH - kB) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt2(kL) + "\" y1=\"" + fmt2(kT) + "\" x2=\"" + fmt2(kL) +
           "\" y2=\"" + fmt2(kH - kB) + "\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        double fx = xmin + (xmax - xmin) * i / 4.0;
        double fy = ymin + (ymax - ymin) * i / 4.0;
        double gx = px(fx), gy = py(fy);
        svg += "<line x1=\"" + fmt2(gx) + "\" y1=\"" + fmt2(kH - kB) + "\" x2=\"" + fmt2(gx) +
               "\" y2=\"" + fmt2(kH - kB + 6) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt2(gx) + "\" y=\"" + fmt2(kH - kB + 20) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + fmt4(fx) + "</text>\n";
        svg += "<line x1=\"" + fmt2(kL - 6) + "\" y1=\"" + fmt2(gy) + "\" x2=\"" + fmt2(kL) +
               "\" y2=\"" + fmt2(gy) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt2(kL - 10) + "\" y=\"" + fmt2(gy + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + fmt4(fy) + "</text>\n";
    }
    svg += "<text x=\"" + fmt2((kL + kW - kR) / 2) + "\" y=\"" + fmt2(kH - 10) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt2((kT + kH - kB) / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt2((kT + kH - kB) / 2) + ")\">" + y_label + "</text>\n";

    double legend_y = kT + 16;
    for (const auto& s : series) {
        if (s.has_fit) {
            svg += "<line x1=\"" + fmt2(px(xmin)) + "\" y1=\"" +
                   fmt2(py(s.fit_slope * xmin + s.fit_intercept)) + "\" x2=\"" + fmt2(px(xmax)) +
                   "\" y2=\"" + fmt2(py(s.fit_slope * xmax + s.fit_intercept)) + "\" stroke=\"" +
                   s.color + "\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
        }
        std::string pts;
        for (auto [x, y] : s.points) {
            if (!pts.empty()) pts += ' ';
            pts += fmt2(px(x)) + "," + fmt2(py(y));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\" points=\"" +
               pts + "\"/>\n";
        for (auto [x, y] : s.points)
            svg += "<circle cx=\"" + fmt2(px(x)) + "\" cy=\"" + fmt2(py(y)) +
                   "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
        svg += "<text x=\"" + fmt2(kW - kR - 8) + "\" y=\"" + fmt2(legend_y) +
               "\" font-size=\"12\" text-anchor=\"end\" fill=\"" + s.color + "\">" + s.label +
               "</text>\n";
        legend_y += 16;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace entroscale::cli
