#pragma once

#include <span>
#include <vector>

#include "toffe/neuro/tape.hpp"

namespace toffe::neuro {

/// Plain gradient descent p <- p - lr * g followed by each parameter's box
/// clamp. Throws std::domain_error naming the first parameter with a
/// non-finite gradient, before touching any parameter.
void sgd_step(std::span<Parameter* const> params, double lr);

void zero_grads(std::span<Parameter* const> params);
/// Multiplies every accumulated gradient by `factor` (batch averaging).
void scale_grads(std::span<Parameter* const> params, double factor);

/// Adam with the same finite-gradient check and clamping as sgd_step.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<Parameter* const> params);
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long steps_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace toffe::neuro
