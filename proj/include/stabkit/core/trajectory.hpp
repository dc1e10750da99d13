#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace stabkit {

// Per-frame camera pose signals: translation in pixels, rotation in radians.
struct Trajectory {
  std::vector<double> tx;
  std::vector<double> ty;
  std::vector<double> theta;

  Trajectory() = default;
  explicit Trajectory(std::size_t length)
      : tx(length, 0.0), ty(length, 0.0), theta(length, 0.0) {}

  std::size_t size() const { return tx.size(); }

  // Throws ValidationError unless the three signals share a length >= 1 and
  // hold finite values.
  void validate() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// CSV with header `t,tx,ty,theta`, full double precision.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& file);
Trajectory read_trajectory_csv(const std::filesystem::path& file);

}  // namespace stabkit
