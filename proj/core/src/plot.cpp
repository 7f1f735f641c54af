#include "naqbc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "naqbc/errors.hpp"
#include "naqbc/table_io.hpp"

namespace naqbc {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 40.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string px(double v) { return fmt_fixed(v, 2); }

std::string escape_xml(const std::string& s) {
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

struct Axis {
  double lo = 0.0;
  double hi = 1.0;

  void expand(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi <= lo) {
      lo -= 0.5;
      hi += 0.5;
      return;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
  double frac(double v) const { return (v - lo) / (hi - lo); }
};

std::vector<double> ema(const std::vector<double>& ys, double weight) {
  std::vector<double> out;
  out.reserve(ys.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    prev = i == 0 ? ys[i] : weight * prev + (1.0 - weight) * ys[i];
    out.push_back(prev);
  }
  return out;
}

void line(std::ostringstream& svg, double x1, double y1, double x2, double y2,
          const std::string& color, double width, bool dashed = false) {
  svg << "<line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(x2) << "\" y2=\""
      << px(y2) << "\" stroke=\"" << color << "\" stroke-width=\"" << px(width) << "\"";
  if (dashed) svg << " stroke-dasharray=\"6,4\"";
  svg << "/>\n";
}

void text(std::ostringstream& svg, double x, double y, const std::string& content,
          const std::string& anchor, double size, const std::string& extra = "") {
  svg << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-family=\"sans-serif\""
      << " font-size=\"" << px(size) << "\" text-anchor=\"" << anchor << "\"" << extra << ">"
      << escape_xml(content) << "</text>\n";
}

}  // namespace

std::string render_plot(PlotKind kind, const std::vector<PlotSeries>& series,
                        const PlotOptions& options) {
  if (series.empty()) throw UsageError("plot: no series given");
  for (const PlotSeries& s : series) {
    if (s.ys.empty()) throw UsageError("plot: series '" + s.label + "' is empty");
    if (!s.horizontal_rule && s.xs.size() != s.ys.size())
      throw UsageError("plot: series '" + s.label + "' has mismatched x/y lengths");
  }

  const bool log_x = kind == PlotKind::kEtaVsGamma;
  const bool log_y = kind == PlotKind::kMseVsTrainsize;
  const bool bars = kind == PlotKind::kCrossvalBox;
  const bool eta_reference = kind != PlotKind::kMseVsTrainsize;

  auto tx = [&](double v) { return log_x ? std::log2(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  // Smoothed copies where requested.
  std::vector<PlotSeries> drawn = series;
  if (kind == PlotKind::kMseVsTrainsize && options.smoothing > 0.0)
    for (PlotSeries& s : drawn)
      if (!s.horizontal_rule) s.ys = ema(s.ys, options.smoothing);

  Axis ax, ay;
  bool first_point = true;
  for (const PlotSeries& s : drawn) {
    for (std::size_t i = 0; i < s.ys.size(); ++i) {
      const double yv = ty(s.ys[i]);
      if (s.horizontal_rule) {
        if (first_point) ay.lo = ay.hi = yv;
        ay.expand(yv);
        first_point = false;
        continue;
      }
      const double xv = tx(s.xs[i]);
      if (first_point) {
        ax.lo = ax.hi = xv;
        ay.lo = ay.hi = yv;
        first_point = false;
      }
      ax.expand(xv);
      ay.expand(yv);
    }
  }
  if (eta_reference) ay.expand(ty(1.0));
  if (bars) {
    ay.expand(0.0);
    ax.lo = -0.5;
    double hi = 0.5;
    for (const PlotSeries& s : drawn)
      for (double x : s.xs) hi = std::max(hi, x + 0.5);
    ax.hi = hi;
  }

  // Gamma ticks sit at the data values; collect before padding.
  std::vector<double> x_tick_values;
  if (log_x) {
    for (const PlotSeries& s : drawn)
      if (!s.horizontal_rule)
        for (double x : s.xs)
          if (std::find(x_tick_values.begin(), x_tick_values.end(), x) == x_tick_values.end())
            x_tick_values.push_back(x);
    std::sort(x_tick_values.begin(), x_tick_values.end());
  }

  ax.pad();
  ay.pad();

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_px = [&](double v) { return kLeft + ax.frac(tx(v)) * plot_w; };
  auto y_px = [&](double v) { return kHeight - kBottom - ay.frac(ty(v)) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\""
      << px(kHeight) << "\" viewBox=\"0 0 " << px(kWidth) << " " << px(kHeight) << "\">\n";
  svg << "<rect width=\"" << px(kWidth) << "\" height=\"" << px(kHeight)
      << "\" fill=\"white\"/>\n";

  // Frame.
  line(svg, kLeft, kTop, kLeft, kHeight - kBottom, "#333333", 1.0);
  line(svg, kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "#333333", 1.0);

  // X ticks.
  if (bars && !options.x_tick_labels.empty()) {
    for (std::size_t i = 0; i < options.x_tick_labels.size(); ++i) {
      const double xp = kLeft + ax.frac(static_cast<double>(i)) * plot_w;
      line(svg, xp, kHeight - kBottom, xp, kHeight - kBottom + 5.0, "#333333", 1.0);
      text(svg, xp, kHeight - kBottom + 20.0, options.x_tick_labels[i], "middle", 12.0);
    }
  } else if (log_x) {
    for (double v : x_tick_values) {
      const double xp = x_px(v);
      line(svg, xp, kHeight - kBottom, xp, kHeight - kBottom + 5.0, "#333333", 1.0);
      text(svg, xp, kHeight - kBottom + 20.0, fmt_g(v), "middle", 12.0);
    }
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double fv = ax.lo + (ax.hi - ax.lo) * i / 4.0;
      const double xp = kLeft + ax.frac(fv) * plot_w;
      line(svg, xp, kHeight - kBottom, xp, kHeight - kBottom + 5.0, "#333333", 1.0);
      text(svg, xp, kHeight - kBottom + 20.0, fmt_g(fv), "middle", 12.0);
    }
  }

  // Y ticks.
  for (int i = 0; i <= 4; ++i) {
    const double fv = ay.lo + (ay.hi - ay.lo) * i / 4.0;
    const double yp = kHeight - kBottom - ay.frac(fv) * plot_h;
    line(svg, kLeft - 5.0, yp, kLeft, yp, "#333333", 1.0);
    const double label = log_y ? std::pow(10.0, fv) : fv;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", label);
    text(svg, kLeft - 10.0, yp + 4.0, buf, "end", 12.0);
  }

  // Axis labels and title.
  text(svg, kLeft + plot_w / 2.0, kHeight - 15.0, options.x_label, "middle", 14.0);
  text(svg, 20.0, kTop + plot_h / 2.0, options.y_label, "middle", 14.0,
       " transform=\"rotate(-90 20 " + px(kTop + plot_h / 2.0) + ")\"");
  text(svg, kWidth / 2.0, 25.0, options.title, "middle", 16.0);

  // Reference line at eta = 1 (random sampling).
  if (eta_reference)
    line(svg, kLeft, y_px(1.0), kWidth - kRight, y_px(1.0), "#d62728", 1.5, true);

  // Series.
  int color_index = 0;
  double legend_y = kTop + 8.0;
  for (const PlotSeries& s : drawn) {
    const std::string color = kPalette[color_index % kPaletteSize];
    ++color_index;

    if (s.horizontal_rule) {
      line(svg, kLeft, y_px(s.ys[0]), kWidth - kRight, y_px(s.ys[0]), color, 1.5, true);
    } else if (bars) {
      const double group_frac = 0.8 / static_cast<double>(drawn.size());
      const std::size_t series_pos = static_cast<std::size_t>(color_index - 1);
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        const double unit = plot_w / (ax.hi - ax.lo);
        const double x0 =
            kLeft + ax.frac(s.xs[i] - 0.4 + group_frac * static_cast<double>(series_pos)) * plot_w;
        const double w = group_frac * unit;
        const double y_val = y_px(s.ys[i]);
        const double y_base = y_px(0.0);
        const double top = std::min(y_val, y_base);
        const double h = std::abs(y_base - y_val);
        svg << "<rect x=\"" << px(x0) << "\" y=\"" << px(top) << "\" width=\"" << px(w)
            << "\" height=\"" << px(h) << "\" fill=\"" << color << "\"/>\n";
      }
    } else {
      if (s.xs.size() > 1) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
          if (i) svg << ' ';
          svg << px(x_px(s.xs[i])) << ',' << px(y_px(s.ys[i]));
        }
        svg << "\"/>\n";
      }
      for (std::size_t i = 0; i < s.xs.size(); ++i)
        svg << "<circle cx=\"" << px(x_px(s.xs[i])) << "\" cy=\"" << px(y_px(s.ys[i]))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }

    if (!s.label.empty()) {
      line(svg, kWidth - kRight - 150.0, legend_y, kWidth - kRight - 130.0, legend_y, color,
           2.0, s.horizontal_rule);
      text(svg, kWidth - kRight - 124.0, legend_y + 4.0, s.label, "start", 12.0);
      legend_y += 16.0;
    }
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_plot(const std::string& path, PlotKind kind, const std::vector<PlotSeries>& series,
                const PlotOptions& options) {
  const std::string content = render_plot(kind, series, options);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("plot: cannot write '" + path + "'");
  out << content;
}

}  // namespace naqbc
