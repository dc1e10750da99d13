#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace stabkit::test {

// |X_k|^2 of the mean-removed signal by the textbook O(N^2) sum.
inline std::vector<double> dft_energy(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  std::vector<double> energy(n / 2 + 1, 0.0);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = 2.0 * std::numbers::pi * k * t / n;
      re += (x[t] - mean) * std::cos(a);
      im -= (x[t] - mean) * std::sin(a);
    }
    energy[k] = re * re + im * im;
  }
  return energy;
}

inline double band_sum(const std::vector<double>& e, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t k = lo; k <= hi && k < e.size(); ++k) s += e[k];
  return s;
}

}  // namespace stabkit::test
