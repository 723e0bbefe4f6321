#pragma once

#include "toffe/neuro/tape.hpp"

namespace toffe::neuro {

enum class SurrogateShape { Triangle, FastSigmoid };

/// Stand-in derivative for the Heaviside spike function.
///   Triangle:    max(0, 1 - |z| / width)
///   FastSigmoid: 1 / (1 + |z| / width)^2
struct Surrogate {
  SurrogateShape shape = SurrogateShape::Triangle;
  double width = 1.0;

  double grad(double z) const;
  /// Antiderivative of grad() from -infinity: the smooth step whose exact
  /// derivative is the surrogate.
  double smoothed(double z) const;
};

double surrogate_spike_grad(double z, const Surrogate& surrogate = {});

/// Hard emits exact {0,1} spikes; Smoothed replaces the step by
/// Surrogate::smoothed so that finite differences see the same derivative the
/// backward pass uses. Smoothed exists for gradient verification.
enum class SpikeMode { Hard, Smoothed };

struct Conv2dSpec {
  int stride = 1;
  int padding = 0;
};

/// Cross-correlation of x [C, H, W] with w [O, C, K, K] plus optional bias [O].
/// Zero-heavy inputs are scattered instead of gathered; both paths accumulate
/// each output in the same kernel order.
Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias, Conv2dSpec spec);
Shape conv2d_output_shape(const Shape& x, const Shape& w, Conv2dSpec spec);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// x * s for a one-element s.
Var scale(Var x, Var s);
/// x / s for a one-element s.
Var divide(Var x, Var s);
Var add_constant(Var x, double c);
Var multiply_constant(Var x, double c);
Var maximum(Var a, Var b);
Var relu(Var x);
Var reshape(Var x, Shape shape);
Var sum(Var x);
Var spike(Var z, const Surrogate& surrogate, SpikeMode mode = SpikeMode::Hard);
Var conv2d(Var x, Var w, Conv2dSpec spec);
Var conv2d(Var x, Var w, Var bias, Conv2dSpec spec);
/// w [out, in] times flattened x, plus b [out].
Var linear(Var x, Var w, Var b);

/// Weighted mean of binary cross-entropy on logits; 0 when all weights are 0.
Var bce_with_logits(Var logits, const Tensor& target, const Tensor& weight);
Var mse(Var prediction, const Tensor& target);

}  // namespace toffe::neuro
