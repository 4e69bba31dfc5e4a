#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hdclust::svg {

namespace {

constexpr double kPanelWidth = 320.0;
constexpr double kPanelHeight = 260.0;
constexpr double kMarginLeft = 58.0;
constexpr double kMarginRight = 12.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 42.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      const double pad = std::max(std::abs(lo) * 0.1, 0.5);
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

void render_panel(std::string& out, const Panel& panel, double x0) {
  auto tx = [&](double v) { return panel.log_x ? std::log10(v) : v; };
  Range xr;
  Range yr;
  for (const auto& s : panel.series) {
    for (double v : s.x) xr.add(tx(v));
    for (double v : s.y) yr.add(v);
  }
  for (const auto& r : panel.ref_lines) yr.add(r.y);
  xr.finish();
  yr.finish();

  const double left = x0 + kMarginLeft;
  const double right = x0 + kPanelWidth - kMarginRight;
  const double top = kMarginTop;
  const double bottom = kPanelHeight - kMarginBottom;
  auto px = [&](double v) { return left + (tx(v) - xr.lo) / (xr.hi - xr.lo) * (right - left); };
  auto py = [&](double v) { return bottom - (v - yr.lo) / (yr.hi - yr.lo) * (bottom - top); };

  out += "<g>\n";
  out += "<text x=\"" + fmt(x0 + kPanelWidth / 2) + "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">" +
         escape(panel.title) + "</text>\n";
  out += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(right - left) +
         "\" height=\"" + fmt(bottom - top) + "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double yv = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    out += "<text x=\"" + fmt(left - 4) + "\" y=\"" + fmt(py(yv) + 4) +
           "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(yv) + "</text>\n";
  }
  // x ticks at the data points of the first series
  if (!panel.series.empty()) {
    for (double xv : panel.series.front().x) {
      out += "<line x1=\"" + fmt(px(xv)) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" + fmt(px(xv)) +
             "\" y2=\"" + fmt(bottom + 4) + "\" stroke=\"#444\"/>\n";
      out += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(bottom + 16) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(xv) + "</text>\n";
    }
  }
  out += "<text x=\"" + fmt((left + right) / 2) + "\" y=\"" + fmt(kPanelHeight - 8) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + escape(panel.x_label) + "</text>\n";
  out += "<text x=\"" + fmt(x0 + 12) + "\" y=\"" + fmt((top + bottom) / 2) +
         "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " + fmt(x0 + 12) + " " +
         fmt((top + bottom) / 2) + ")\">" + escape(panel.y_label) + "</text>\n";

  for (const auto& r : panel.ref_lines) {
    out += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(py(r.y)) + "\" x2=\"" + fmt(right) + "\" y2=\"" +
           fmt(py(r.y)) + "\" stroke=\"" + r.color + "\" stroke-dasharray=\"5,3\"><title>" +
           escape(r.label) + "</title></line>\n";
  }
  for (const auto& s : panel.series) {
    std::string points;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += fmt(px(s.x[i])) + "," + fmt(py(s.y[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"><title>" + escape(s.label) + "</title></polyline>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      out += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) + "\" r=\"2.5\" fill=\"" +
             s.color + "\"/>\n";
    }
  }
  // legend
  double ly = top + 12;
  for (const auto& s : panel.series) {
    out += "<text x=\"" + fmt(right - 4) + "\" y=\"" + fmt(ly) + "\" text-anchor=\"end\" font-size=\"10\" fill=\"" +
           s.color + "\">" + escape(s.label) + "</text>\n";
    ly += 12;
  }
  for (const auto& r : panel.ref_lines) {
    out += "<text x=\"" + fmt(right - 4) + "\" y=\"" + fmt(ly) + "\" text-anchor=\"end\" font-size=\"10\" fill=\"" +
           r.color + "\">" + escape(r.label) + "</text>\n";
    ly += 12;
  }
  out += "</g>\n";
}

}  // namespace

std::string render(const std::vector<Panel>& panels) {
  const double width = kPanelWidth * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
                    fmt(kPanelHeight) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(kPanelHeight) +
                    "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    render_panel(out, panels[i], kPanelWidth * static_cast<double>(i));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace hdclust::svg
