#include "dynreg/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace dynreg {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b"};

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Frame padded(double x0, double x1, double y0, double y1) {
  auto widen = [](double& lo, double& hi) {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  };
  widen(x0, x1);
  widen(y0, y1);
  return {x0, x1, y0, y1};
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" << escape(title) << "</text>\n";
  }
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
      << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"#444\"/>\n";
}

void axis_labels(std::ostringstream& svg, const Frame& f, const std::string& xlabel,
                 const std::string& ylabel, bool log_axes) {
  auto tick = [&](double v) {
    std::ostringstream s;
    s.precision(3);
    s << (log_axes ? std::exp(v) : v);
    return s.str();
  };
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    svg << "<text x=\"" << f.px(xv) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(xv)
        << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(yv)
        << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(xlabel)
      << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

}  // namespace

std::string regret_plot_svg(const std::vector<RegretRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<ScalingPoint>> points;
  for (const RegretRecord& r : records) {
    if (!r.ok() || !(r.regret_offline > 0.0)) continue;
    if (!points.contains(r.algorithm)) order.push_back(r.algorithm);
    points[r.algorithm].push_back({r.n, r.regret_offline});
  }
  if (order.empty()) throw DomainError("no record with positive regret to plot");

  struct Series {
    std::string name;
    std::vector<double> lx, ly;
    bool fitted = false;
    double slope = 0.0, intercept = 0.0;
  };
  std::vector<Series> series;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const std::string& name : order) {
    Series s;
    s.name = name;
    std::map<long, std::vector<double>> by_n;
    for (const ScalingPoint& p : points[name]) by_n[p.n].push_back(p.regret);
    for (auto& [n, v] : by_n) {
      std::sort(v.begin(), v.end());
      const std::size_t m = v.size();
      const double median = m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
      s.lx.push_back(std::log(static_cast<double>(n)));
      s.ly.push_back(std::log(median));
    }
    if (by_n.size() >= 4) {
      const ScalingFit fit = fit_scaling_slope(points[name]);
      s.fitted = true;
      s.slope = fit.slope;
      s.intercept = fit.intercept;
    }
    for (std::size_t i = 0; i < s.lx.size(); ++i) {
      x0 = std::min(x0, s.lx[i]);
      x1 = std::max(x1, s.lx[i]);
      y0 = std::min(y0, s.ly[i]);
      y1 = std::max(y1, s.ly[i]);
    }
    series.push_back(std::move(s));
  }
  const Frame f = padded(x0, x1, y0, y1);

  std::ostringstream svg;
  svg.precision(6);
  open_svg(svg, "median regret vs offline optimum");
  axis_labels(svg, f, "n (log scale)", "regret (log scale)", true);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* colour = kPalette[i % kPalette.size()];
    svg << "<g class=\"series\" data-name=\"" << escape(s.name) << "\">\n";
    for (std::size_t j = 0; j < s.lx.size(); ++j) {
      svg << "<circle cx=\"" << f.px(s.lx[j]) << "\" cy=\"" << f.py(s.ly[j]) << "\" r=\"4\" fill=\""
          << colour << "\"/>\n";
    }
    if (s.fitted) {
      const double a = s.lx.front();
      const double b = s.lx.back();
      svg << "<line class=\"fit\" x1=\"" << f.px(a) << "\" y1=\"" << f.py(s.intercept + s.slope * a)
          << "\" x2=\"" << f.px(b) << "\" y2=\"" << f.py(s.intercept + s.slope * b) << "\" stroke=\""
          << colour << "\" stroke-dasharray=\"5,3\"/>\n";
    }
    svg << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 16 * static_cast<double>(i)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colour << "\">"
        << escape(s.name);
    if (s.fitted) svg << " (slope " << s.slope << ')';
    svg << "</text>\n</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string trend_overlay_svg(const Vector& series, const Vector& trend, const std::string& title) {
  if (series.size() == 0) throw DomainError("cannot plot an empty series");
  if (trend.size() != series.size()) throw DomainError("trend and series lengths differ");
  const double lo = std::min(series.minCoeff(), trend.minCoeff());
  const double hi = std::max(series.maxCoeff(), trend.maxCoeff());
  const Frame f = padded(1.0, static_cast<double>(series.size()), lo, hi);

  std::ostringstream svg;
  svg.precision(6);
  open_svg(svg, title);
  axis_labels(svg, f, "t", "value", false);
  auto polyline = [&](const Vector& v, const char* cls, const char* colour, double width) {
    svg << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << colour
        << "\" stroke-width=\"" << width << "\" points=\"";
    for (Eigen::Index t = 0; t < v.size(); ++t) {
      if (t > 0) svg << ' ';
      svg << f.px(static_cast<double>(t + 1)) << ',' << f.py(v[t]);
    }
    svg << "\"/>\n";
  };
  polyline(series, "series", "#999999", 1.0);
  polyline(trend, "trend", "#1f77b4", 2.0);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dynreg
