#ifndef CXGDIAL_SVG_HPP
#define CXGDIAL_SVG_HPP

#include <string>
#include <vector>

namespace cxgdial {

// Minimal deterministic SVG output; no timestamps or generator metadata, so
// identical inputs give identical bytes.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke = "#444", double width = 1.0);
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none");
  void circle(double cx, double cy, double r, const std::string& fill);
  void text(double x, double y, const std::string& content, double size = 12.0,
            const std::string& anchor = "start", const std::string& fill = "#111");

  std::string render() const;
  void save(const std::string& path) const;

 private:
  double width_, height_;
  std::vector<std::string> elements_;
};

// Palette used across all charts, cycled by series index.
const std::string& chart_color(size_t index);

struct BarSeries {
  std::string name;
  std::vector<double> values;  // one per category
};

// Grouped vertical bars with axis labels and a legend.
std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::string>& categories,
                          const std::vector<BarSeries>& series,
                          const std::string& y_label);

// One 100%-stacked bar per category.
std::string stacked_bar_svg(const std::string& title,
                            const std::vector<std::string>& categories,
                            const std::vector<BarSeries>& series);

struct LabeledPoint {
  std::string label;
  double x = 0.0, y = 0.0;
};

std::string scatter_svg(const std::string& title,
                        const std::vector<LabeledPoint>& points,
                        const std::string& x_label, const std::string& y_label);

// One panel per region: every feature weight as a vertical line, the value
// axis clipped to +/- clip.
std::string weight_profile_svg(const std::string& title,
                               const std::vector<std::string>& regions,
                               const std::vector<std::vector<double>>& weights,
                               double clip);

// Row-major confusion heatmap (rows gold, columns predicted).
std::string heatmap_svg(const std::string& title,
                        const std::vector<std::string>& labels,
                        const std::vector<long long>& counts);

}  // namespace cxgdial

#endif  // CXGDIAL_SVG_HPP
