#include "toffe/models/ofs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "toffe/neuro/lif.hpp"
#include "toffe/sim/random.hpp"

#include <fmt/format.h>

namespace toffe::models {

using neuro::Parameter;
using neuro::Tensor;

neuro::Tensor bin_tensor(const BinnedVolume& volume, int bin) {
  Tensor x({2, volume.height(), volume.width()});
  const std::size_t plane = static_cast<std::size_t>(volume.height()) * volume.width();
  for (int c = 0; c < 2; ++c) {
    const auto counts = volume.plane(bin, c);
    for (std::size_t i = 0; i < plane; ++i) x.data[c * plane + i] = static_cast<double>(counts[i]);
  }
  return x;
}

OfsModel::OfsModel(int speed_bin, OfsConfig config, std::uint64_t seed)
    : speed_bin_(speed_bin), config_(config) {
  if (config_.kernel < 1 || config_.kernel % 2 == 0) throw std::invalid_argument("OFS kernel must be odd");
  if (config_.in_channels != 2) throw std::invalid_argument("OFS expects two polarity channels");
  const int k = config_.kernel;
  Tensor w({1, config_.in_channels, k, k});
  const double bound = 1.0 / std::sqrt(static_cast<double>(config_.in_channels * k * k));
  Rng rng(seed);
  for (double& v : w.data) v = rng.uniform(-bound, bound);
  weight = Parameter("weight", std::move(w));
  v_th = Parameter("v_th", Tensor({1}, {config_.init_v_th}), 1e-3);
  leak = Parameter("leak", Tensor({1}, {config_.init_leak}), 0.0, 1.0);
}

void OfsModel::check_input(const BinnedVolume& volume) const {
  if (volume.bins() < 1) throw std::invalid_argument("OFS: empty volume");
}

OfsOutput OfsModel::forward(const BinnedVolume& volume) const {
  check_input(volume);
  const int h = volume.height(), w = volume.width();
  const neuro::Conv2dSpec spec{1, config_.kernel / 2};
  auto state = neuro::LifLayerState::rest({1, h, w}, v_th.value[0], leak.value[0]);
  OfsOutput out;
  out.aggregate = BinaryGrid(h, w);
  for (int b = 0; b < volume.bins(); ++b) {
    const Tensor current = neuro::conv2d_forward(bin_tensor(volume, b), weight.value, nullptr, spec);
    auto step = neuro::lif_step(state, current);
    BinaryGrid grid(h, w);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (step.spikes[i] > 0.0) {
        grid.set(i, true);
        out.aggregate.set(i, true);
      }
    }
    out.spikes.push_back(std::move(grid));
    state = std::move(step.state);
  }
  return out;
}

OfsTrace OfsModel::forward(neuro::Tape& tape, const BinnedVolume& volume, neuro::SpikeMode mode) {
  check_input(volume);
  const neuro::Shape shape{1, volume.height(), volume.width()};
  const neuro::Conv2dSpec spec{1, config_.kernel / 2};
  neuro::Var w = tape.parameter(weight);
  neuro::Var threshold = tape.parameter(v_th);
  neuro::Var lambda = tape.parameter(leak);
  neuro::Var u = tape.constant(Tensor(shape));
  neuro::Var o = tape.constant(Tensor(shape));
  OfsTrace trace;
  for (int b = 0; b < volume.bins(); ++b) {
    neuro::Var x = tape.constant(bin_tensor(volume, b));
    neuro::Var current = neuro::conv2d(x, w, spec);
    const auto step = neuro::lif_step(u, o, current, threshold, lambda, config_.surrogate, mode);
    trace.z.push_back(step.z);
    trace.spikes.push_back(step.o);
    trace.z_max = b == 0 ? step.z : neuro::maximum(trace.z_max, step.z);
    u = step.u;
    o = step.o;
  }
  return trace;
}

neuro::Var OfsModel::logits(neuro::Tape& tape, const BinnedVolume& volume) {
  return neuro::multiply_constant(forward(tape, volume).z_max, config_.logit_scale);
}

void OfsModel::round_to_float() {
  for (Parameter* p : parameters()) {
    for (double& v : p->value.data) v = static_cast<double>(static_cast<float>(v));
  }
}

neuro::Checkpoint OfsModel::to_checkpoint() const {
  neuro::Checkpoint ck;
  ck.kind = "ofs";
  ck.metadata["speed_bin"] = std::to_string(speed_bin_);
  ck.metadata["kernel"] = std::to_string(config_.kernel);
  ck.metadata["logit_scale"] = fmt::format("{}", config_.logit_scale);
  ck.metadata["surrogate_width"] = fmt::format("{}", config_.surrogate.width);
  ck.metadata["surrogate_shape"] =
      config_.surrogate.shape == neuro::SurrogateShape::Triangle ? "triangle" : "fast-sigmoid";
  ck.add(weight);
  ck.add(v_th);
  ck.add(leak);
  return ck;
}

OfsModel OfsModel::from_checkpoint(const neuro::Checkpoint& ck) {
  if (ck.kind != "ofs") throw neuro::CheckpointError("expected an OFS checkpoint, got '" + ck.kind + "'");
  OfsConfig config;
  config.kernel = std::stoi(ck.meta("kernel"));
  config.logit_scale = std::stod(ck.meta("logit_scale"));
  config.surrogate.width = std::stod(ck.meta("surrogate_width"));
  config.surrogate.shape = ck.meta("surrogate_shape") == "triangle" ? neuro::SurrogateShape::Triangle
                                                                     : neuro::SurrogateShape::FastSigmoid;
  OfsModel model(std::stoi(ck.meta("speed_bin")), config, 0);
  ck.load_into(model.weight);
  ck.load_into(model.v_th);
  ck.load_into(model.leak);
  return model;
}

}  // namespace toffe::models
