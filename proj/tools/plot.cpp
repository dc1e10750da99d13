#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "stabkit/core/error.hpp"

namespace stabkit::cli {

namespace {

const cv::Scalar kPalette[] = {{200, 90, 30}, {40, 40, 220}, {60, 160, 60}, {150, 60, 150}};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void draw_panel(cv::Mat& canvas, const Panel& panel, cv::Rect area) {
  const int left = area.x + 60;
  const int right = area.x + area.width - 15;
  const int top = area.y + 28;
  const int bottom = area.y + area.height - 22;
  cv::putText(canvas, panel.title, {left, area.y + 18}, cv::FONT_HERSHEY_SIMPLEX, 0.5,
              {20, 20, 20}, 1, cv::LINE_AA);
  cv::rectangle(canvas, {left, top}, {right, bottom}, {160, 160, 160});

  double lo = 1e300, hi = -1e300;
  std::size_t n = 0;
  for (const auto& s : panel.series) {
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    n = std::max(n, s.y.size());
  }
  if (n < 2 || lo > hi) return;
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto px = [&](std::size_t i, double v) {
    const double fx = static_cast<double>(i) / static_cast<double>(n - 1);
    const double fy = (v - lo) / (hi - lo);
    return cv::Point(static_cast<int>(std::lround(left + fx * (right - left))),
                     static_cast<int>(std::lround(bottom - fy * (bottom - top))));
  };
  cv::putText(canvas, fmt(hi), {area.x + 4, top + 10}, cv::FONT_HERSHEY_SIMPLEX, 0.35,
              {80, 80, 80}, 1, cv::LINE_AA);
  cv::putText(canvas, fmt(lo), {area.x + 4, bottom}, cv::FONT_HERSHEY_SIMPLEX, 0.35,
              {80, 80, 80}, 1, cv::LINE_AA);
  if (lo < 0.0 && hi > 0.0)
    cv::line(canvas, px(0, 0.0), px(n - 1, 0.0), {215, 215, 215});

  int legend_x = right - 10;
  for (std::size_t k = panel.series.size(); k-- > 0;) {
    const auto& s = panel.series[k];
    const cv::Scalar color = kPalette[s.color % 4];
    // Non-finite samples leave gaps.
    for (std::size_t i = 1; i < s.y.size(); ++i)
      if (std::isfinite(s.y[i - 1]) && std::isfinite(s.y[i]))
        cv::line(canvas, px(i - 1, s.y[i - 1]), px(i, s.y[i]), color, 1, cv::LINE_AA);
    int baseline = 0;
    const auto size = cv::getTextSize(s.label, cv::FONT_HERSHEY_SIMPLEX, 0.4, 1, &baseline);
    legend_x -= size.width;
    cv::putText(canvas, s.label, {legend_x, area.y + 18}, cv::FONT_HERSHEY_SIMPLEX, 0.4, color,
                1, cv::LINE_AA);
    legend_x -= 14;
  }
}

}  // namespace

void write_line_plot(const std::vector<Panel>& panels, const std::filesystem::path& file,
                     int width, int panel_height) {
  cv::Mat canvas(panel_height * static_cast<int>(panels.size()), width, CV_8UC3,
                 cv::Scalar(255, 255, 255));
  for (std::size_t i = 0; i < panels.size(); ++i)
    draw_panel(canvas, panels[i], {0, static_cast<int>(i) * panel_height, width, panel_height});
  if (!cv::imwrite(file.string(), canvas)) throw IoError("cannot write plot " + file.string());
}

}  // namespace stabkit::cli
