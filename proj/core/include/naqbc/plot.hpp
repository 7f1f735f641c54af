#pragma once

#include <string>
#include <vector>

namespace naqbc {

enum class PlotKind { kEtaVsGamma, kMseVsTrainsize, kCrossvalBox };

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  // When set, the series is one y value drawn as a horizontal line across
  // the plot (methods without a gamma axis).
  bool horizontal_rule = false;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  // Exponential moving average weight on the previous value; 0 disables.
  // Applied only to mse_vs_trainsize series, at plot time.
  double smoothing = 0.0;
  // Labels under the bar groups of a crossval_box plot.
  std::vector<std::string> x_tick_labels;
};

// Self-contained SVG text. Identical inputs yield identical bytes.
// eta_vs_gamma uses a log2 x axis with ticks at the data's gamma values and
// draws a red dashed reference line at eta = 1; mse_vs_trainsize uses a
// log10 y axis; crossval_box draws grouped bars plus the eta = 1 line.
std::string render_plot(PlotKind kind, const std::vector<PlotSeries>& series,
                        const PlotOptions& options);

void write_plot(const std::string& path, PlotKind kind, const std::vector<PlotSeries>& series,
                const PlotOptions& options);

}  // namespace naqbc
