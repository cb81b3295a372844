#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "pasym/errors.hpp"

namespace pasym {

/// Minimal polyline plot writer: axes, tick labels, one polyline per series.
/// Optional log10 mapping per axis for decade-spanning quantities.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
          bool logy = false)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
        logx_(logx), logy_(logy) {}

  void add_series(const std::string& name, const std::vector<double>& xs,
                  const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw DomainError("SvgPlot: mismatched series lengths");
    Series s;
    s.name = name;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = logx_ ? std::log10(xs[i]) : xs[i];
      const double y = logy_ ? std::log10(ys[i]) : ys[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      s.x.push_back(x);
      s.y.push_back(y);
    }
    series_.push_back(std::move(s));
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open for writing: " + path);
    const int w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series_)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    if (xmin > xmax) {
      xmin = 0;
      xmax = 1;
      ymin = 0;
      ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
      << title_ << "</text>\n";
    // axes
    f << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
    char buf[64];
    for (int t = 0; t <= 4; ++t) {
      const double xv = xmin + (xmax - xmin) * t / 4.0;
      const double yv = ymin + (ymax - ymin) * t / 4.0;
      std::snprintf(buf, sizeof(buf), "%.3g", xv);
      f << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << (logx_ ? "1e" : "") << buf
        << "</text>\n";
      std::snprintf(buf, sizeof(buf), "%.3g", yv);
      f << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << (logy_ ? "1e" : "") << buf
        << "</text>\n";
    }
    f << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel_ << "</text>\n";
    f << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (mt + h - mb) / 2 << ")\">" << ylabel_ << "</text>\n";

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t si = 0; si < series_.size(); ++si) {
      const auto& s = series_[si];
      f << "<polyline fill=\"none\" stroke=\"" << kColors[si % 5]
        << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
        f << buf;
      }
      f << "\"/>\n";
      f << "<text x=\"" << w - mr - 6 << "\" y=\"" << mt + 16 * (si + 1)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << kColors[si % 5] << "\">"
        << s.name << "</text>\n";
    }
    f << "</svg>\n";
  }

 private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
  };
  std::string title_, xlabel_, ylabel_;
  bool logx_, logy_;
  std::vector<Series> series_;
};

}  // namespace pasym
