#include "cxgdial/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cxgdial {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double width) {
  elements_.push_back("<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) +
                      "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                      "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                      num(width) + "\"/>");
}

void SvgCanvas::rect(double x, double y, double w, double h,
                     const std::string& fill, const std::string& stroke) {
  elements_.push_back("<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
                      num(w) + "\" height=\"" + num(h) + "\" fill=\"" + fill +
                      "\" stroke=\"" + stroke + "\"/>");
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
  elements_.push_back("<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) +
                      "\" r=\"" + num(r) + "\" fill=\"" + fill + "\"/>");
}

void SvgCanvas::text(double x, double y, const std::string& content, double size,
                     const std::string& anchor, const std::string& fill) {
  elements_.push_back("<text x=\"" + num(x) + "\" y=\"" + num(y) +
                      "\" font-size=\"" + num(size) +
                      "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
                      "\" fill=\"" + fill + "\">" + escape(content) + "</text>");
}

std::string SvgCanvas::render() const {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_)
      << "\" height=\"" << num(height_) << "\" viewBox=\"0 0 " << num(width_)
      << " " << num(height_) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\""
      << num(height_) << "\" fill=\"#ffffff\"/>\n";
  for (const auto& e : elements_) out << e << '\n';
  out << "</svg>\n";
  return out.str();
}

void SvgCanvas::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write SVG to " + path);
  out << render();
}

const std::string& chart_color(size_t index) {
  static const std::vector<std::string> palette = {
      "#4878a8", "#e49444", "#55a868", "#c44e52",
      "#8172b3", "#937860", "#da8bc3", "#8c8c8c"};
  return palette[index % palette.size()];
}

namespace {

constexpr double kWidth = 720.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 50.0, kBottom = 70.0;

void draw_frame(SvgCanvas* svg, const std::string& title) {
  svg->text(kWidth / 2, 24, title, 15, "middle");
  svg->line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom);
  svg->line(kLeft, kTop, kLeft, kHeight - kBottom);
}

void draw_legend(SvgCanvas* svg, const std::vector<BarSeries>& series) {
  double x = kLeft;
  const double y = kHeight - 22;
  for (size_t s = 0; s < series.size(); ++s) {
    svg->rect(x, y - 9, 10, 10, chart_color(s));
    svg->text(x + 14, y, series[s].name, 11);
    x += 24 + 7.0 * series[s].name.size();
  }
}

}  // namespace

std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::string>& categories,
                          const std::vector<BarSeries>& series,
                          const std::string& y_label) {
  SvgCanvas svg(kWidth, kHeight);
  draw_frame(&svg, title);
  svg.text(16, kTop - 10, y_label, 11);

  double max_v = 0.0;
  for (const auto& s : series)
    for (double v : s.values) max_v = std::max(max_v, v);
  if (max_v <= 0.0) max_v = 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const size_t n_cat = categories.size();
  const size_t n_ser = std::max<size_t>(1, series.size());
  const double slot = plot_w / std::max<size_t>(1, n_cat);
  const double bar_w = slot * 0.8 / n_ser;

  for (int tick = 0; tick <= 4; ++tick) {
    double frac = tick / 4.0;
    double y = kHeight - kBottom - frac * plot_h;
    svg.line(kLeft - 4, y, kLeft, y);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", frac * max_v);
    svg.text(kLeft - 8, y + 4, buf, 10, "end");
  }

  for (size_t c = 0; c < n_cat; ++c) {
    double x0 = kLeft + c * slot + slot * 0.1;
    for (size_t s = 0; s < series.size(); ++s) {
      double v = series[s].values[c];
      double h = plot_h * v / max_v;
      svg.rect(x0 + s * bar_w, kHeight - kBottom - h, bar_w * 0.92, h,
               chart_color(s));
    }
    svg.text(kLeft + c * slot + slot / 2, kHeight - kBottom + 16, categories[c],
             10, "middle");
  }
  draw_legend(&svg, series);
  return svg.render();
}

std::string stacked_bar_svg(const std::string& title,
                            const std::vector<std::string>& categories,
                            const std::vector<BarSeries>& series) {
  SvgCanvas svg(kWidth, kHeight);
  draw_frame(&svg, title);
  svg.text(16, kTop - 10, "%", 11);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const size_t n_cat = categories.size();
  const double slot = plot_w / std::max<size_t>(1, n_cat);

  for (int tick = 0; tick <= 4; ++tick) {
    double frac = tick / 4.0;
    double y = kHeight - kBottom - frac * plot_h;
    svg.line(kLeft - 4, y, kLeft, y);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(frac * 100));
    svg.text(kLeft - 8, y + 4, buf, 10, "end");
  }

  for (size_t c = 0; c < n_cat; ++c) {
    double total = 0.0;
    for (const auto& s : series) total += s.values[c];
    if (total <= 0.0) total = 100.0;
    double x0 = kLeft + c * slot + slot * 0.18;
    double y = kHeight - kBottom;
    for (size_t s = 0; s < series.size(); ++s) {
      double h = plot_h * series[s].values[c] / total;
      y -= h;
      svg.rect(x0, y, slot * 0.64, h, chart_color(s));
    }
    svg.text(kLeft + c * slot + slot / 2, kHeight - kBottom + 16, categories[c],
             10, "middle");
  }
  draw_legend(&svg, series);
  return svg.render();
}

std::string scatter_svg(const std::string& title,
                        const std::vector<LabeledPoint>& points,
                        const std::string& x_label, const std::string& y_label) {
  SvgCanvas svg(kWidth, kHeight);
  draw_frame(&svg, title);
  svg.text(kWidth / 2, kHeight - 30, x_label, 11, "middle");
  svg.text(16, kTop - 10, y_label, 11);

  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double span_x = std::max(1e-9, max_x - min_x);
  double span_y = std::max(1e-9, max_y - min_y);
  min_x -= span_x * 0.15;
  max_x += span_x * 0.15;
  min_y -= span_y * 0.15;
  max_y += span_y * 0.15;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  for (size_t i = 0; i < points.size(); ++i) {
    double px = kLeft + (points[i].x - min_x) / (max_x - min_x) * plot_w;
    double py = kHeight - kBottom - (points[i].y - min_y) / (max_y - min_y) * plot_h;
    svg.circle(px, py, 5, chart_color(i));
    svg.text(px + 8, py + 4, points[i].label, 11);
  }
  return svg.render();
}

std::string weight_profile_svg(const std::string& title,
                               const std::vector<std::string>& regions,
                               const std::vector<std::vector<double>>& weights,
                               double clip) {
  const size_t n = regions.size();
  const double panel_h = 90.0;
  const double height = kTop + n * panel_h + 30.0;
  SvgCanvas svg(kWidth, height);
  svg.text(kWidth / 2, 24, title, 15, "middle");

  for (size_t r = 0; r < n; ++r) {
    const double mid = kTop + r * panel_h + panel_h / 2;
    const double half = panel_h * 0.42;
    svg.line(kLeft, mid, kWidth - kRight, mid, "#bbb");
    svg.text(kLeft - 8, mid + 4, regions[r], 11, "end");
    const auto& w = weights[r];
    const double plot_w = kWidth - kLeft - kRight;
    for (size_t j = 0; j < w.size(); ++j) {
      double v = std::clamp(w[j], -clip, clip);
      double x = kLeft + (w.size() <= 1 ? 0.0 : plot_w * j / (w.size() - 1));
      svg.line(x, mid, x, mid - v / clip * half, chart_color(r), 0.8);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "+/-%.2g", clip);
    svg.text(kWidth - kRight, mid - half, buf, 9, "end", "#888");
  }
  return svg.render();
}

std::string heatmap_svg(const std::string& title,
                        const std::vector<std::string>& labels,
                        const std::vector<long long>& counts) {
  const size_t n = labels.size();
  SvgCanvas svg(kWidth, kHeight);
  svg.text(kWidth / 2, 24, title, 15, "middle");

  long long max_off = 1;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j) max_off = std::max(max_off, counts[i * n + j]);

  const double cell = std::min((kWidth - kLeft - kRight) / n,
                               (kHeight - kTop - kBottom) / n);
  for (size_t i = 0; i < n; ++i) {
    svg.text(kLeft - 6, kTop + i * cell + cell / 2 + 4, labels[i], 10, "end");
    svg.text(kLeft + i * cell + cell / 2, kTop + n * cell + 14, labels[i], 10,
             "middle");
    for (size_t j = 0; j < n; ++j) {
      long long v = counts[i * n + j];
      std::string fill;
      if (i == j) {
        fill = "#c6dbc6";
      } else {
        int shade = static_cast<int>(
            255 - 155.0 * static_cast<double>(v) / static_cast<double>(max_off));
        char buf[16];
        std::snprintf(buf, sizeof(buf), "#ff%02x%02x", shade, shade);
        fill = buf;
      }
      svg.rect(kLeft + j * cell, kTop + i * cell, cell, cell, fill, "#ddd");
      svg.text(kLeft + j * cell + cell / 2, kTop + i * cell + cell / 2 + 4,
               std::to_string(v), 10, "middle");
    }
  }
  return svg.render();
}

}  // namespace cxgdial
