#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "heavytail/io/csv.hpp"

namespace heavytail::io {

/// Stroke conventions for scaling plots: dotted for empirical curves, solid for
/// the asymptotic form, dot-dashed for the q/2 baseline.
enum class LineStyle { dotted, solid, dot_dashed, markers };

/// Minimal static SVG 1.1 line/scatter plot (800 x 600).
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  SvgPlot& add(std::string name, std::span<const double> x, std::span<const double> y, LineStyle style) {
    Series s{std::move(name), {}, {}, style};
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
      if (std::isfinite(x[i]) && std::isfinite(y[i])) {
        s.x.push_back(x[i]);
        s.y.push_back(y[i]);
      }
    }
    series_.push_back(std::move(s));
    return *this;
  }

  [[nodiscard]] std::string render() const {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series_) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const auto xt = ticks(x0, x1);
    const auto yt = ticks(y0, y1);
    x0 = std::min(x0, xt.front());
    x1 = std::max(x1, xt.back());
    y0 = std::min(y0, yt.front());
    y1 = std::max(y1, yt.back());

    auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
    auto py = [&](double v) { return kHeight - kBottom - (v - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };

    std::string o;
    o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
    o += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    o += text(kWidth / 2, 30, title_, "middle", 18);
    o += text(kWidth / 2, kHeight - 15, x_label_, "middle", 14);
    o += "<text x=\"20\" y=\"" + num(kHeight / 2) + "\" font-family=\"sans-serif\" font-size=\"14\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 20 " + num(kHeight / 2) + ")\">" + escape(y_label_) +
         "</text>\n";

    // Axes and ticks.
    o += line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom);
    o += line(kLeft, kTop, kLeft, kHeight - kBottom);
    for (double t : xt) {
      o += line(px(t), kHeight - kBottom, px(t), kHeight - kBottom + 6);
      o += text(px(t), kHeight - kBottom + 22, tick_label(t), "middle", 12);
    }
    for (double t : yt) {
      o += line(kLeft - 6, py(t), kLeft, py(t));
      o += text(kLeft - 10, py(t) + 4, tick_label(t), "end", 12);
    }

    static constexpr const char* kColors[] = {"#1f4e9c", "#b2182b", "#333333", "#2b8c3e"};
    for (std::size_t k = 0; k < series_.size(); ++k) {
      const auto& s = series_[k];
      const char* color = kColors[k % 4];
      if (s.style == LineStyle::markers) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          o += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"2\" fill=\"" + color +
               "\"/>\n";
        }
      } else if (!s.x.empty()) {
        o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\"";
        if (s.style == LineStyle::dotted) o += " stroke-dasharray=\"2,4\"";
        if (s.style == LineStyle::dot_dashed) o += " stroke-dasharray=\"10,4,2,4\"";
        o += " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (i) o += ' ';
          o += num(px(s.x[i])) + "," + num(py(s.y[i]));
        }
        o += "\"/>\n";
      }
      o += text(kWidth - kRight - 10, kTop + 18 + 18 * static_cast<double>(k), s.name, "end", 12, color);
    }
    o += "</svg>\n";
    return o;
  }

 private:
  struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    LineStyle style;
  };

  static constexpr double kWidth = 800, kHeight = 600, kLeft = 80, kRight = 30, kTop = 50, kBottom = 60;

  static std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      step = m * mag;
      if (raw <= step) break;
    }
    std::vector<double> t;
    for (double v = std::floor(lo / step) * step; v <= hi + 0.5 * step; v += step) t.push_back(v);
    return t;
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }

  static std::string tick_label(double v) {
    if (std::abs(v) < 1e-12) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }

  static std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
      switch (c) {
        case '<': r += "&lt;"; break;
        case '>': r += "&gt;"; break;
        case '&': r += "&amp;"; break;
        case '"': r += "&quot;"; break;
        default: r += c;
      }
    }
    return r;
  }

  static std::string line(double xa, double ya, double xb, double yb) {
    return "<line x1=\"" + num(xa) + "\" y1=\"" + num(ya) + "\" x2=\"" + num(xb) + "\" y2=\"" + num(yb) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }

  static std::string text(double x, double y, const std::string& s, const char* anchor, int size,
                          const char* fill = "black") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           std::to_string(size) + "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\">" + escape(s) +
           "</text>\n";
  }

  std::string title_;
  std::string x_label_;
  std::string y_label_;
  std::vector<Series> series_;
};

}  // namespace heavytail::io
