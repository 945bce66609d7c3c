#include "hgdeblur/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hgdeblur {

void SvgPlot::add_series(std::string label, std::vector<double> x, std::vector<double> y,
                         std::string color) {
    if (x.size() != y.size()) throw std::invalid_argument("series size mismatch");
    series_.push_back({std::move(label), std::move(x), std::move(y), std::move(color)});
}

void SvgPlot::write(const std::string& path) const {
    const double margin = 50.0;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (width_ - 2 * margin);
    };
    auto py = [&](double y) {
        return height_ - margin - (y - ymin) / (ymax - ymin) * (height_ - 2 * margin);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width_ / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width_ - 2 * margin
        << "\" height=\"" << height_ - 2 * margin
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";

    // axis labels at the corners
    char buf[64];
    auto label = [&](double v, double x, double y, const char* anchor) {
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        out << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">" << buf
            << "</text>\n";
    };
    label(xmin, margin, height_ - margin + 16, "middle");
    label(xmax, width_ - margin, height_ - margin + 16, "middle");
    label(ymin, margin - 6, height_ - margin, "end");
    label(ymax, margin - 6, margin + 4, "end");

    double legend_y = margin + 14;
    for (const auto& s : series_) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << width_ - margin - 6 << "\" y=\"" << legend_y
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
            << s.color << "\">" << s.label << "</text>\n";
        legend_y += 15.0;
    }
    out << "</svg>\n";

    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << out.str();
}

}  // namespace hgdeblur
