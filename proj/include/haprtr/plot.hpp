#pragma once

/** Static SVG chart of mean Hamming distance against pd, one series per
 * method, with standard-error bars. */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "haprtr/errors.hpp"
#include "haprtr/experiment.hpp"

namespace haprtr {

struct SeriesPoint {
  double pd = 0.0;
  double mean_hd = 0.0;
  /// Sample standard deviation over sqrt(count); 0 for a single trial.
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Mean hd per (method, pd), pooled over err values and trials. Methods and
/// pd values come out in ascending order.
inline std::map<std::string, std::vector<SeriesPoint>>
summarize_hd(const std::vector<ExperimentRecord> &records) {
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const auto &r : records)
    groups[r.method][r.pd].push_back(static_cast<double>(r.hd));

  std::map<std::string, std::vector<SeriesPoint>> out;
  for (const auto &[method, by_pd] : groups) {
    for (const auto &[pd, values] : by_pd) {
      SeriesPoint p;
      p.pd = pd;
      p.count = values.size();
      double sum = 0.0;
      for (double v : values)
        sum += v;
      p.mean_hd = sum / static_cast<double>(p.count);
      if (p.count > 1) {
        double ss = 0.0;
        for (double v : values)
          ss += (v - p.mean_hd) * (v - p.mean_hd);
        p.std_error = std::sqrt(ss / static_cast<double>(p.count - 1)) /
                      std::sqrt(static_cast<double>(p.count));
      }
      out[method].push_back(p);
    }
  }
  return out;
}

inline std::string render_hd_chart(const std::vector<ExperimentRecord> &records) {
  if (records.empty())
    throw ParameterError("plot: no data rows");
  const auto series = summarize_hd(records);

  constexpr double width = 640, height = 420;
  constexpr double left = 70, right = 150, top = 30, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double pd_min = records.front().pd, pd_max = pd_min, hd_max = 0.0;
  for (const auto &[method, points] : series)
    for (const auto &p : points) {
      pd_min = std::min(pd_min, p.pd);
      pd_max = std::max(pd_max, p.pd);
      hd_max = std::max(hd_max, p.mean_hd + p.std_error);
    }
  if (pd_max - pd_min < 1e-9) {
    pd_min -= 0.05;
    pd_max += 0.05;
  } else {
    const double pad = 0.05 * (pd_max - pd_min);
    pd_min -= pad;
    pd_max += pad;
  }
  hd_max = hd_max > 0.0 ? 1.1 * hd_max : 1.0;

  auto sx = [&](double pd) {
    return left + (pd - pd_min) / (pd_max - pd_min) * plot_w;
  };
  auto sy = [&](double hd) { return top + plot_h - hd / hd_max * plot_h; };
  auto fmt = [](double v) { return detail::format_fixed(v, 2); };

  static const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width)
      << ' ' << fmt(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" fill=\"white\"/>\n";

  // Axes and ticks.
  svg << "<g class=\"axes\" stroke=\"black\">\n";
  svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h)
      << "\" x2=\"" << fmt(left + plot_w) << "\" y2=\"" << fmt(top + plot_h)
      << "\"/>\n";
  svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\""
      << fmt(left) << "\" y2=\"" << fmt(top + plot_h) << "\"/>\n";
  svg << "</g>\n";
  constexpr int ticks = 5;
  for (int t = 0; t <= ticks; ++t) {
    const double pd = pd_min + (pd_max - pd_min) * t / ticks;
    const double hd = hd_max * t / ticks;
    svg << "<text class=\"xtick\" x=\"" << fmt(sx(pd)) << "\" y=\""
        << fmt(top + plot_h + 18) << "\" text-anchor=\"middle\">"
        << detail::format_fixed(pd, 2) << "</text>\n";
    svg << "<text class=\"ytick\" x=\"" << fmt(left - 8) << "\" y=\""
        << fmt(sy(hd) + 4) << "\" text-anchor=\"end\">"
        << detail::format_fixed(hd, 1) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\""
      << fmt(height - 15) << "\" text-anchor=\"middle\">pd</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt(top + plot_h / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt(top + plot_h / 2) << ")\">mean hd</text>\n";

  std::size_t index = 0;
  for (const auto &[method, points] : series) {
    const char *color = palette[index % (sizeof palette / sizeof *palette)];
    svg << "<path class=\"series\" data-method=\"" << method << "\" d=\"";
    for (std::size_t k = 0; k < points.size(); ++k)
      svg << (k == 0 ? "M " : " L ") << fmt(sx(points[k].pd)) << ' '
          << fmt(sy(points[k].mean_hd));
    svg << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    for (const auto &p : points) {
      const double x = sx(p.pd);
      svg << "<line class=\"errbar\" x1=\"" << fmt(x) << "\" y1=\""
          << fmt(sy(p.mean_hd - p.std_error)) << "\" x2=\"" << fmt(x)
          << "\" y2=\"" << fmt(sy(p.mean_hd + p.std_error)) << "\" stroke=\""
          << color << "\"/>\n";
      svg << "<circle class=\"point\" cx=\"" << fmt(x) << "\" cy=\""
          << fmt(sy(p.mean_hd)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(index);
    svg << "<line class=\"legend\" x1=\"" << fmt(left + plot_w + 15)
        << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + plot_w + 40)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(left + plot_w + 46) << "\" y=\"" << fmt(ly + 4)
        << "\">" << method << "</text>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

} // namespace haprtr
