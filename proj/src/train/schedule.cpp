#include "stabkit/train/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "stabkit/core/error.hpp"

namespace stabkit::train {

double lr_plateau(std::span<const double> history, double lr, int patience, double factor) {
  if (!(factor > 0.0 && factor < 1.0)) throw RangeError("plateau factor must be in (0,1)");
  if (patience < 1) throw RangeError("plateau patience must be positive");
  const auto p = static_cast<std::size_t>(patience);
  if (history.size() <= p) return lr;
  const double best_before = *std::min_element(history.begin(), history.end() - patience);
  const double best_recent = *std::min_element(history.end() - patience, history.end());
  const bool improved = best_recent < best_before - kPlateauThreshold * std::abs(best_before);
  return improved ? lr : lr * factor;
}

PlateauScheduler::PlateauScheduler(double lr, int patience, double factor)
    : lr_(lr), patience_(patience), factor_(factor) {}

double PlateauScheduler::step(double validation_loss) {
  history_.push_back(validation_loss);
  const double next = lr_plateau(history_, lr_, patience_, factor_);
  if (next != lr_) {
    const double best = *std::min_element(history_.begin(), history_.end());
    history_.assign(1, best);
    lr_ = next;
  }
  return lr_;
}

double lr_linear(long long iter, long long max_iters, double lr_init) {
  if (max_iters <= 0) throw RangeError("max_iters must be positive");
  if (iter < 0 || iter > max_iters) throw RangeError("iteration outside [0, max_iters]");
  return lr_init * (1.0 - static_cast<double>(iter) / static_cast<double>(max_iters));
}

template <class T>
Adam<T>::Adam(std::vector<nn::ParamView<T>> params, double beta1, double beta2, double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_) {
    m_.emplace_back(p.value.size(), T(0));
    v_.emplace_back(p.value.size(), T(0));
  }
}

template <class T>
void Adam<T>::step(double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const T b1 = static_cast<T>(beta1_);
  const T b2 = static_cast<T>(beta2_);
  const T step = static_cast<T>(lr / c1);
  const T inv_c2 = static_cast<T>(1.0 / c2);
  const T eps = static_cast<T>(eps_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    T* m = m_[i].data();
    T* v = v_[i].data();
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const T g = p.grad[k];
      m[k] = b1 * m[k] + (T(1) - b1) * g;
      v[k] = b2 * v[k] + (T(1) - b2) * g * g;
      p.value[k] -= step * m[k] / (std::sqrt(v[k] * inv_c2) + eps);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace stabkit::train
