#ifndef HGDEBLUR_SVG_HPP
#define HGDEBLUR_SVG_HPP

#include <string>
#include <vector>

namespace hgdeblur {

/// Minimal static line-plot writer. Plots are diagnostics only and never
/// acceptance evidence.
class SvgPlot {
  public:
    SvgPlot(std::string title, int width = 900, int height = 480)
        : title_(std::move(title)), width_(width), height_(height) {}

    void add_series(std::string label, std::vector<double> x, std::vector<double> y,
                    std::string color);
    void write(const std::string& path) const;

  private:
    struct Series {
        std::string label;
        std::vector<double> x, y;
        std::string color;
    };
    std::string title_;
    int width_, height_;
    std::vector<Series> series_;
};

}  // namespace hgdeblur

#endif
