#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "stabkit/metrics/features.hpp"

namespace stabkit::metrics {

// 3x3 projective map normalized so that m(2,2) == 1.
struct Homography {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  static Homography normalized(const Eigen::Matrix3d& raw);
  Point2 apply(const Point2& p) const;
  Homography inverse() const;
  Homography operator*(const Homography& rhs) const { return normalized(m * rhs.m); }
};

// Similarity/rigid map about the origin: p -> scale * R(theta) p + (tx, ty).
Homography homography_from_pose(double tx, double ty, double theta, double scale = 1.0);

// Expresses `h` in coordinates whose origin is (cx, cy).
Homography recenter(const Homography& h, double cx, double cy);

// Least-squares DLT with Hartley normalization; needs >= 4 pairs.
Homography fit_homography_dlt(const std::vector<Correspondence>& pairs);

struct RansacOptions {
  int iterations = 2000;
  double threshold_px = 2.0;
  std::uint64_t seed = 0;
};

struct HomographyFit {
  Homography h;
  std::vector<bool> inliers;
  std::size_t inlier_count = 0;
};

// Maps pair.a -> pair.b. Throws InsufficientDataError for < 4 pairs and
// DegeneracyError when the final inlier support is collinear.
HomographyFit estimate_homography_ransac(const std::vector<Correspondence>& pairs,
                                         const RansacOptions& options = {});

struct PoseDecomposition {
  double tx = 0.0;
  double ty = 0.0;
  double theta = 0.0;
  double scale = 1.0;
  double anisotropy = 1.0;  // sigma_min / sigma_max of the affine part
};

// Singular values and polar rotation of the top-left 2x2 block; translation
// from the third column. Throws DegeneracyError for a singular block.
PoseDecomposition decompose_homography(const Homography& h);

double reprojection_error(const Homography& h, const Correspondence& pair);

}  // namespace stabkit::metrics
