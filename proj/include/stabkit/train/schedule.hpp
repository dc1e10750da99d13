#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stabkit/nn/layers.hpp"

namespace stabkit::train {

// Relative improvement a new loss needs over the best earlier loss.
inline constexpr double kPlateauThreshold = 1e-4;

// history: validation losses since the last reduction, oldest first. Returns
// lr * factor when none of the last `patience` entries improved on the best
// earlier entry by more than kPlateauThreshold (relative); lr otherwise.
double lr_plateau(std::span<const double> history, double lr, int patience = 5,
                  double factor = 0.5);

// Keeps the history window for lr_plateau, restarting it after a reduction.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr, int patience = 5, double factor = 0.5);
  double step(double validation_loss);
  double lr() const { return lr_; }

 private:
  double lr_;
  int patience_;
  double factor_;
  std::vector<double> history_;
};

// lr_init * (1 - iter / max_iters). Throws RangeError outside [0, max_iters].
double lr_linear(long long iter, long long max_iters, double lr_init);

// Adam with bias correction over a fixed set of parameter views.
template <class T>
class Adam {
 public:
  Adam(std::vector<nn::ParamView<T>> params, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(double lr);
  long long steps() const { return t_; }

 private:
  std::vector<nn::ParamView<T>> params_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  double beta1_;
  double beta2_;
  double eps_;
  long long t_ = 0;
};

}  // namespace stabkit::train
