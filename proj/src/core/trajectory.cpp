#include "stabkit/core/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "stabkit/core/error.hpp"

namespace stabkit {

void Trajectory::validate() const {
  if (tx.empty() || ty.size() != tx.size() || theta.size() != tx.size()) {
    throw ValidationError("trajectory signals must share a length >= 1");
  }
  for (std::size_t i = 0; i < tx.size(); ++i) {
    if (!std::isfinite(tx[i]) || !std::isfinite(ty[i]) || !std::isfinite(theta[i])) {
      throw ValidationError("trajectory has non-finite value at frame " + std::to_string(i));
    }
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& file) {
  traj.validate();
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out.precision(17);
  out << "t,tx,ty,theta\n";
  for (std::size_t t = 0; t < traj.size(); ++t) {
    out << t << ',' << traj.tx[t] << ',' << traj.ty[t] << ',' << traj.theta[t] << '\n';
  }
  if (!out) throw IoError("cannot write " + file.string());
}

Trajectory read_trajectory_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open trajectory " + file.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,tx,ty,theta", 0) != 0) {
    throw FormatError("trajectory CSV header must be t,tx,ty,theta");
  }
  Trajectory traj;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double values[4];
    for (double& v : values) {
      if (!std::getline(row, cell, ',')) throw FormatError("short trajectory row: " + line);
      try {
        v = std::stod(cell);
      } catch (const std::exception&) {
        throw FormatError("bad trajectory value: " + cell);
      }
    }
    if (static_cast<std::size_t>(values[0]) != expected++) {
      throw IntegrityError("trajectory rows are not consecutive");
    }
    traj.tx.push_back(values[1]);
    traj.ty.push_back(values[2]);
    traj.theta.push_back(values[3]);
  }
  traj.validate();
  return traj;
}

}  // namespace stabkit
