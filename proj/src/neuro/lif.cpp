#include "toffe/neuro/lif.hpp"

#include <stdexcept>

namespace toffe::neuro {

LifLayerState LifLayerState::rest(const Shape& shape, double v_th, double leak) {
  return {Tensor(shape), Tensor(shape), v_th, leak};
}

LifStepResult lif_step(const LifLayerState& state, const Tensor& input_current) {
  if (state.u.shape != input_current.shape || state.o_prev.shape != input_current.shape) {
    throw std::invalid_argument("lif_step: state " + shape_string(state.u.shape) + " vs input " +
                                shape_string(input_current.shape));
  }
  LifStepResult r{state, Tensor(input_current.shape), Tensor(input_current.shape)};
  for (std::size_t i = 0; i < input_current.size(); ++i) {
    const double u = state.leak * state.u[i] + input_current[i] - state.v_th * state.o_prev[i];
    const double z = u / state.v_th - 1.0;
    r.state.u[i] = u;
    r.z[i] = z;
    r.spikes[i] = z > 0.0 ? 1.0 : 0.0;
  }
  r.state.o_prev = r.spikes;
  return r;
}

LifVars lif_step(Var u_prev, Var o_prev, Var input_current, Var v_th, Var leak,
                 const Surrogate& surrogate, SpikeMode mode) {
  if (u_prev.shape() != input_current.shape() || o_prev.shape() != input_current.shape()) {
    throw std::invalid_argument("lif_step: state and input shapes differ");
  }
  Var u = sub(add(scale(u_prev, leak), input_current), scale(o_prev, v_th));
  Var z = add_constant(divide(u, v_th), -1.0);
  Var o = spike(z, surrogate, mode);
  return {u, z, o};
}

}  // namespace toffe::neuro
