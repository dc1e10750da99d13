#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace stabkit::cli {

struct Series {
  std::string label;
  std::vector<double> y;
  int color = 0;  // index into a fixed palette
};

// One panel per entry in `panels`, stacked vertically, written as PNG.
struct Panel {
  std::string title;
  std::vector<Series> series;
};

void write_line_plot(const std::vector<Panel>& panels, const std::filesystem::path& file,
                     int width = 900, int panel_height = 240);

}  // namespace stabkit::cli
