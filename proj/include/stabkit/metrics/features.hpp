#pragma once

#include <vector>

#include "stabkit/core/image.hpp"

namespace stabkit::metrics {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Keypoint {
  int x = 0;
  int y = 0;
  double response = 0.0;
};

struct Correspondence {
  Point2 a;
  Point2 b;
  double ncc = 0.0;
};

struct CornerOptions {
  int max_corners = 500;
  double min_distance = 8.0;
  double quality = 0.01;  // relative to the strongest response
  int border = 6;
};

// Harris-response local maxima, strongest first (ties by y, then x), with
// greedy suppression of weaker corners closer than min_distance.
std::vector<Keypoint> detect_corners(const Image& frame, const CornerOptions& options = {});

struct MatchOptions {
  int patch_radius = 5;   // 11x11 template
  int search_radius = 16;
  double min_ncc = 0.8;
  int refine_iterations = 3;
};

// For each keypoint of `a`, the best zero-mean NCC placement of its patch in
// `b` within the search window, refined to sub-pixel precision by
// Lucas-Kanade steps. Matches below min_ncc are dropped.
std::vector<Correspondence> match_corners(const Image& a, const Image& b,
                                          const std::vector<Keypoint>& keypoints,
                                          const MatchOptions& options = {});

}  // namespace stabkit::metrics
