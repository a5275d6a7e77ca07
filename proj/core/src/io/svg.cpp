#include "tradenet/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tradenet::io {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string Tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(x) < 1e-12 ? 0.0 : x);
  return buf;
}

// Step of roughly `target` ticks over [lo, hi] using 1/2/5 multiples.
double NiceStep(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1 : f < 3 ? 2 : f < 7 ? 5 : 10;
  return nice * mag;
}

void Extend(double& lo, double& hi) {
  if (!(lo < hi)) {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    lo -= 0.5;
    hi += 0.5;
  }
}

}  // namespace

std::string RenderLineChart(const ChartSpec& spec) {
  const double w = spec.width;
  const double h = spec.height;
  const double left = 64;
  const double right = 150;
  const double top = 36;
  const double bottom = 52;
  const double pw = w - left - right;
  const double ph = h - top - bottom;

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const ChartSeries& s : spec.series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      x_lo = std::min(x_lo, s.x[k]);
      x_hi = std::max(x_hi, s.x[k]);
      y_lo = std::min(y_lo, s.lo.empty() ? s.y[k] : s.lo[k]);
      y_hi = std::max(y_hi, s.hi.empty() ? s.y[k] : s.hi[k]);
    }
  }
  if (spec.y_min) y_lo = *spec.y_min;
  if (spec.y_max) y_hi = *spec.y_max;
  Extend(x_lo, x_hi);
  Extend(y_lo, y_hi);
  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double y) {
    y = std::clamp(y, y_lo, y_hi);
    return top + ph - (y - y_lo) / (y_hi - y_lo) * ph;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
         "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " +
         std::to_string(spec.width) + " " + std::to_string(spec.height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + Num(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         Escape(spec.title) + "</text>\n";

  // Grid and ticks.
  const double xs = NiceStep(x_lo, x_hi, 6);
  for (double t = std::ceil(x_lo / xs) * xs; t <= x_hi + xs * 1e-9; t += xs) {
    const std::string x = Num(px(t));
    out += "<line x1=\"" + x + "\" y1=\"" + Num(top) + "\" x2=\"" + x + "\" y2=\"" +
           Num(top + ph) + "\" stroke=\"#e0e0e0\"/>\n";
    out += "<text x=\"" + x + "\" y=\"" + Num(top + ph + 16) + "\" text-anchor=\"middle\">" +
           Tick(t) + "</text>\n";
  }
  const double ys = NiceStep(y_lo, y_hi, 5);
  for (double t = std::ceil(y_lo / ys) * ys; t <= y_hi + ys * 1e-9; t += ys) {
    const std::string y = Num(py(t));
    out += "<line x1=\"" + Num(left) + "\" y1=\"" + y + "\" x2=\"" + Num(left + pw) + "\" y2=\"" +
           y + "\" stroke=\"#e0e0e0\"/>\n";
    out += "<text x=\"" + Num(left - 6) + "\" y=\"" + y + "\" dy=\"4\" text-anchor=\"end\">" +
           Tick(t) + "</text>\n";
  }
  out += "<rect x=\"" + Num(left) + "\" y=\"" + Num(top) + "\" width=\"" + Num(pw) +
         "\" height=\"" + Num(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  out += "<text x=\"" + Num(left + pw / 2) + "\" y=\"" + Num(h - 12) +
         "\" text-anchor=\"middle\">" + Escape(spec.x_label) + "</text>\n";
  out += "<text transform=\"translate(16," + Num(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + Escape(spec.y_label) + "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const ChartSeries& s = spec.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (!s.lo.empty() && !s.hi.empty() && !s.x.empty()) {
      std::string pts;
      for (std::size_t j = 0; j < s.x.size(); ++j) {
        pts += Num(px(s.x[j])) + "," + Num(py(s.hi[j])) + " ";
      }
      for (std::size_t j = s.x.size(); j-- > 0;) {
        pts += Num(px(s.x[j])) + "," + Num(py(s.lo[j])) + " ";
      }
      out += "<polygon points=\"" + pts + "\" fill=\"" + color +
             "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
    }
    std::string pts;
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      pts += Num(px(s.x[j])) + "," + Num(py(s.y[j])) + " ";
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.8\"/>\n";
    if (s.x.size() <= 40) {
      for (std::size_t j = 0; j < s.x.size(); ++j) {
        out += "<circle cx=\"" + Num(px(s.x[j])) + "\" cy=\"" + Num(py(s.y[j])) +
               "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
      }
    }
    const double ly = top + 12 + 18.0 * static_cast<double>(k);
    out += "<line x1=\"" + Num(left + pw + 12) + "\" y1=\"" + Num(ly) + "\" x2=\"" +
           Num(left + pw + 32) + "\" y2=\"" + Num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + Num(left + pw + 38) + "\" y=\"" + Num(ly) + "\" dy=\"4\">" +
           Escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace tradenet::io
