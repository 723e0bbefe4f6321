#include "toffe/neuro/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toffe::neuro {
namespace {

void check_finite(std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    if (!p->grad.all_finite()) throw std::domain_error("non-finite gradient for parameter '" + p->name + "'");
  }
}

void clamp(Parameter& p) {
  for (double& v : p.value.data) v = std::clamp(v, p.lower, p.upper);
}

}  // namespace

void sgd_step(std::span<Parameter* const> params, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: learning rate must be positive");
  check_finite(params);
  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= lr * p->grad[i];
    clamp(*p);
  }
}

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) {
    if (p->grad.shape != p->value.shape) p->grad = Tensor(p->value.shape);
    p->zero_grad();
  }
}

void scale_grads(std::span<Parameter* const> params, double factor) {
  for (Parameter* p : params) {
    for (double& g : p->grad.data) g *= factor;
  }
}

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (!(lr > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
}

void Adam::step(std::span<Parameter* const> params) {
  check_finite(params);
  if (m_.empty()) {
    for (const Parameter* p : params) {
      m_.emplace_back(p->value.size(), 0.0);
      v_.emplace_back(p->value.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw std::logic_error("Adam: parameter list changed between steps");
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      p.value[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
    clamp(p);
  }
}

}  // namespace toffe::neuro
