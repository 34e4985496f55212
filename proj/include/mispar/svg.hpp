#pragma once

#include <string>
#include <vector>

#include "mispar/table.hpp"

namespace mispar {

struct PlotSpec {
  std::string x;
  std::vector<std::string> y;
  /// Simulation prefixes (e.g. sim_l1) or mean columns; bars use the matching *_stderr column.
  std::vector<std::string> errbars;
  bool logx = false;
  bool logy = false;
  std::string title;
  int width = 720;
  int height = 480;
  /// Heatmap mode: x and y[0] index the cells, z colours them.
  std::string z;
  double zmax = 0.0;  ///< colour scale cap; 0 picks the 95th percentile of finite z
};

/// Static SVG. Non-finite values break polylines and are never drawn. Each drawn
/// point carries a <title> with the original CSV cell text. Throws MissingColumn.
std::string render_svg(const Table& table, const PlotSpec& spec);

}  // namespace mispar
