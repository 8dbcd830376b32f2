#pragma once
// Static SVG decay plots: log-y line chart of the numeric columns of a CSV
// table against its first column, with optional exponential reference slopes.

#include <sstream>

#include "echolab/csvio.hpp"

namespace echolab {

struct PlotOptions {
  int width = 720, height = 480;
  double margin = 60.0;
  std::vector<double> reference_rates;  // draw exp(−rate·t) guides
  double y_floor = 1e-12;               // clip for the log axis
  std::string title;
};

inline std::string svg_plot_logy(const CsvTable& table, const PlotOptions& opt = {}) {
  if (table.columns.size() < 2 || table.n_rows() < 2)
    throw std::invalid_argument("svg_plot_logy: need a time column and at least one series");
  const auto& t = table.columns[0];
  double t_lo = t.front(), t_hi = t.front();
  for (double v : t) {
    t_lo = std::min(t_lo, v);
    t_hi = std::max(t_hi, v);
  }
  if (t_hi <= t_lo) throw std::invalid_argument("svg_plot_logy: degenerate time axis");
  double y_lo = 1.0, y_hi = 1.0;
  bool any = false;
  for (std::size_t c = 1; c < table.columns.size(); ++c)
    for (double v : table.columns[c])
      if (v > opt.y_floor) {
        if (!any) { y_lo = y_hi = v; any = true; }
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
      }
  if (!any) throw std::invalid_argument("svg_plot_logy: no positive data");
  const double ly_lo = std::floor(std::log10(y_lo));
  const double ly_hi = std::ceil(std::log10(y_hi) + 1e-12);
  const double W = opt.width, H = opt.height, M = opt.margin;
  auto X = [&](double tt) { return M + (tt - t_lo) / (t_hi - t_lo) * (W - 2 * M); };
  auto Y = [&](double v) {
    const double ly = std::log10(std::max(v, opt.y_floor));
    return H - M - (ly - ly_lo) / (ly_hi - ly_lo) * (H - 2 * M);
  };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
    << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  s << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\"" << H - M
    << "\" stroke=\"black\"/>\n";
  // y decade ticks
  for (int d = static_cast<int>(ly_lo); d <= static_cast<int>(ly_hi); ++d) {
    const double y = Y(std::pow(10.0, d));
    s << "<line x1=\"" << M - 5 << "\" y1=\"" << y << "\" x2=\"" << M << "\" y2=\"" << y
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << M - 8 << "\" y=\"" << y + 4
      << "\" font-size=\"11\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  // x ticks (6 divisions)
  for (int k = 0; k <= 6; ++k) {
    const double tt = t_lo + (t_hi - t_lo) * k / 6.0;
    s << "<line x1=\"" << X(tt) << "\" y1=\"" << H - M << "\" x2=\"" << X(tt) << "\" y2=\""
      << H - M + 5 << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << X(tt) << "\" y=\"" << H - M + 18
      << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(tt).substr(0, 6)
      << "</text>\n";
  }
  if (!opt.title.empty())
    s << "<text x=\"" << W / 2 << "\" y=\"" << M - 20
      << "\" font-size=\"14\" text-anchor=\"middle\">" << opt.title << "</text>\n";
  // reference slopes exp(−rate t), anchored at the top of the axis
  for (std::size_t r = 0; r < opt.reference_rates.size(); ++r) {
    const double rate = opt.reference_rates[r];
    s << "<polyline fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"6,4\" points=\"";
    for (int k = 0; k <= 100; ++k) {
      const double tt = t_lo + (t_hi - t_lo) * k / 100.0;
      const double v = y_hi * std::exp(-rate * (tt - t_lo));
      if (v < opt.y_floor) break;
      s << X(tt) << "," << Y(v) << " ";
    }
    s << "\"/>\n<text x=\"" << W - M - 4 << "\" y=\"" << M + 14 + 14.0 * r
      << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#777777\">slope " << rate
      << "</text>\n";
  }
  // data series
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    const char* color = kColors[(c - 1) % 7];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
      const double v = table.columns[c][i];
      if (v <= opt.y_floor) continue;
      s << X(t[i]) << "," << Y(v) << " ";
    }
    s << "\"/>\n<text x=\"" << M + 8 << "\" y=\"" << M + 14 + 14.0 * (c - 1)
      << "\" font-size=\"11\" fill=\"" << color << "\">" << table.header[c] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace echolab
