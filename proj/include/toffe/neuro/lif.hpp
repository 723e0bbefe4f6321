#pragma once

#include "toffe/neuro/ops.hpp"
#include "toffe/neuro/tensor.hpp"

namespace toffe::neuro {

/// Membrane state of one spiking layer with its per-layer threshold and leak.
struct LifLayerState {
  Tensor u;       // membrane potential
  Tensor o_prev;  // spikes emitted on the previous step, {0, 1}
  double v_th = 1.0;
  double leak = 0.9;

  /// Resting state: zero potential, no previous spikes.
  static LifLayerState rest(const Shape& shape, double v_th, double leak);
};

struct LifStepResult {
  LifLayerState state;
  Tensor spikes;
  Tensor z;  // u / v_th - 1
};

/// One leaky integrate-and-fire update:
///   u' = leak * u + input - v_th * o_prev
///   z  = u' / v_th - 1,  o = [z > 0]
/// The soft reset subtracts the threshold on the step after a spike.
LifStepResult lif_step(const LifLayerState& state, const Tensor& input_current);

/// Recorded form of lif_step for training. `v_th` and `leak` are one-element
/// variables so both receive gradients.
struct LifVars {
  Var u;
  Var z;
  Var o;
};

LifVars lif_step(Var u_prev, Var o_prev, Var input_current, Var v_th, Var leak,
                 const Surrogate& surrogate, SpikeMode mode = SpikeMode::Hard);

}  // namespace toffe::neuro
