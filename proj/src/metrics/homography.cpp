#include "stabkit/metrics/homography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "stabkit/core/error.hpp"

namespace stabkit::metrics {

namespace {

// Similarity that moves the centroid to the origin and the mean distance
// to sqrt(2).
Eigen::Matrix3d normalizer(const std::vector<Point2>& pts) {
  double cx = 0.0, cy = 0.0;
  for (const Point2& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= pts.size();
  cy /= pts.size();
  double dist = 0.0;
  for (const Point2& p : pts) dist += std::hypot(p.x - cx, p.y - cy);
  dist /= pts.size();
  const double s = dist > 1e-12 ? std::sqrt(2.0) / dist : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

bool collinear(const Point2& a, const Point2& b, const Point2& c) {
  const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  const double scale = std::max({std::hypot(b.x - a.x, b.y - a.y), std::hypot(c.x - a.x, c.y - a.y), 1.0});
  return std::abs(cross) < 1e-6 * scale * scale;
}

bool degenerate_sample(const std::vector<Correspondence>& pairs, const std::array<std::size_t, 4>& idx) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        if (collinear(pairs[idx[i]].a, pairs[idx[j]].a, pairs[idx[k]].a) ||
            collinear(pairs[idx[i]].b, pairs[idx[j]].b, pairs[idx[k]].b)) {
          return true;
        }
      }
  return false;
}

// Smallest-to-largest eigenvalue ratio of the point scatter.
double spread_ratio(const std::vector<Point2>& pts) {
  double cx = 0, cy = 0;
  for (const Point2& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= pts.size();
  cy /= pts.size();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Point2& p : pts) {
    const Eigen::Vector2d d(p.x - cx, p.y - cy);
    cov += d * d.transpose();
  }
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cov).eigenvalues();
  return ev(1) > 0.0 ? ev(0) / ev(1) : 0.0;
}

}  // namespace

Homography Homography::normalized(const Eigen::Matrix3d& raw) {
  if (std::abs(raw(2, 2)) < 1e-15) throw DegeneracyError("homography with zero scale entry");
  return {raw / raw(2, 2)};
}

Point2 Homography::apply(const Point2& p) const {
  const Eigen::Vector3d q = m * Eigen::Vector3d(p.x, p.y, 1.0);
  return {q(0) / q(2), q(1) / q(2)};
}

Homography Homography::inverse() const { return normalized(m.inverse()); }

Homography homography_from_pose(double tx, double ty, double theta, double scale) {
  Eigen::Matrix3d m;
  const double c = scale * std::cos(theta);
  const double s = scale * std::sin(theta);
  m << c, -s, tx, s, c, ty, 0, 0, 1;
  return {m};
}

Homography recenter(const Homography& h, double cx, double cy) {
  Eigen::Matrix3d to, from;
  to << 1, 0, cx, 0, 1, cy, 0, 0, 1;
  from << 1, 0, -cx, 0, 1, -cy, 0, 0, 1;
  return Homography::normalized(from * h.m * to);
}

Homography fit_homography_dlt(const std::vector<Correspondence>& pairs) {
  if (pairs.size() < 4) throw InsufficientDataError("homography needs >= 4 correspondences");
  std::vector<Point2> pa, pb;
  pa.reserve(pairs.size());
  pb.reserve(pairs.size());
  for (const auto& c : pairs) {
    pa.push_back(c.a);
    pb.push_back(c.b);
  }
  const Eigen::Matrix3d ta = normalizer(pa);
  const Eigen::Matrix3d tb = normalizer(pb);

  Eigen::MatrixXd a(2 * pairs.size(), 9);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Eigen::Vector3d p = ta * Eigen::Vector3d(pa[i].x, pa[i].y, 1.0);
    const Eigen::Vector3d q = tb * Eigen::Vector3d(pb[i].x, pb[i].y, 1.0);
    const double x = p(0), y = p(1), u = q(0), v = q(1);
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  // Null vector of A via the eigen-decomposition of A^T A.
  const Eigen::Matrix<double, 9, 9> ata = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> eig(ata);
  const Eigen::Matrix<double, 9, 1> hvec = eig.eigenvectors().col(0);
  Eigen::Matrix3d hn;
  hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), hvec(8);
  return Homography::normalized(tb.inverse() * hn * ta);
}

double reprojection_error(const Homography& h, const Correspondence& pair) {
  const Point2 p = h.apply(pair.a);
  return std::hypot(p.x - pair.b.x, p.y - pair.b.y);
}

HomographyFit estimate_homography_ransac(const std::vector<Correspondence>& pairs,
                                         const RansacOptions& options) {
  const std::size_t n = pairs.size();
  if (n < 4) throw InsufficientDataError("homography needs >= 4 correspondences, got " + std::to_string(n));

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  bool have_model = false;
  Homography best_h;
  std::size_t best_count = 0;
  double best_err = 0.0;
  for (int it = 0; it < options.iterations; ++it) {
    std::array<std::size_t, 4> idx{};
    for (int i = 0; i < 4; ++i) {
      bool fresh = false;
      while (!fresh) {
        idx[i] = pick(rng);
        fresh = std::find(idx.begin(), idx.begin() + i, idx[i]) == idx.begin() + i;
      }
    }
    if (degenerate_sample(pairs, idx)) continue;
    Homography h;
    try {
      h = fit_homography_dlt({pairs[idx[0]], pairs[idx[1]], pairs[idx[2]], pairs[idx[3]]});
    } catch (const DegeneracyError&) {
      continue;
    }
    if (!h.m.allFinite()) continue;
    std::size_t count = 0;
    double err_sum = 0.0;
    for (const auto& c : pairs) {
      const double e = reprojection_error(h, c);
      if (e < options.threshold_px) {
        ++count;
        err_sum += e;
      }
    }
    if (count < 4) continue;
    const double mean_err = err_sum / count;
    if (!have_model || count > best_count || (count == best_count && mean_err < best_err)) {
      have_model = true;
      best_h = h;
      best_count = count;
      best_err = mean_err;
    }
  }
  if (!have_model) throw DegeneracyError("no non-degenerate homography hypothesis");

  auto collect = [&](const Homography& h, HomographyFit& fit) {
    fit.inliers.assign(n, false);
    fit.inlier_count = 0;
    std::vector<Correspondence> support;
    for (std::size_t i = 0; i < n; ++i) {
      if (reprojection_error(h, pairs[i]) < options.threshold_px) {
        fit.inliers[i] = true;
        ++fit.inlier_count;
        support.push_back(pairs[i]);
      }
    }
    return support;
  };

  HomographyFit fit;
  std::vector<Correspondence> support = collect(best_h, fit);
  for (int round = 0; round < 2; ++round) {
    std::vector<Point2> pa, pb;
    for (const auto& c : support) {
      pa.push_back(c.a);
      pb.push_back(c.b);
    }
    if (support.size() < 4 || spread_ratio(pa) < 1e-8 || spread_ratio(pb) < 1e-8) {
      throw DegeneracyError("inlier support is collinear");
    }
    fit.h = fit_homography_dlt(support);
    HomographyFit refit;
    std::vector<Correspondence> next = collect(fit.h, refit);
    if (refit.inlier_count < fit.inlier_count) break;
    fit.inliers = std::move(refit.inliers);
    fit.inlier_count = refit.inlier_count;
    support = std::move(next);
  }
  return fit;
}

PoseDecomposition decompose_homography(const Homography& h) {
  const Eigen::Matrix3d m = Homography::normalized(h.m).m;
  const Eigen::Matrix2d a = m.topLeftCorner<2, 2>();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector2d sv = svd.singularValues();
  if (!(sv(1) > 1e-12)) throw DegeneracyError("singular affine part");
  Eigen::Matrix2d u = svd.matrixU();
  const Eigen::Matrix2d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(1) *= -1.0;
  const Eigen::Matrix2d r = u * v.transpose();

  PoseDecomposition d;
  d.tx = m(0, 2);
  d.ty = m(1, 2);
  d.theta = std::atan2(r(1, 0), r(0, 0));
  d.scale = std::sqrt(sv(0) * sv(1));
  d.anisotropy = sv(1) / sv(0);
  return d;
}

}  // namespace stabkit::metrics
