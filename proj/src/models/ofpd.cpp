#include "toffe/models/ofpd.hpp"

#include <cmath>
#include <stdexcept>

#include "toffe/neuro/ops.hpp"
#include "toffe/sim/random.hpp"

namespace toffe::models {

using neuro::Parameter;
using neuro::Tensor;

namespace {

Parameter uniform_param(const char* name, neuro::Shape shape, int fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.data) v = rng.uniform(-bound, bound);
  return Parameter(name, std::move(t));
}

}  // namespace

neuro::Tensor ofpd_input(const BinnedVolume& volume, const BinaryGrid* region) {
  const int h = volume.height(), w = volume.width();
  if (region && (region->height() != h || region->width() != w)) {
    throw std::invalid_argument("ofpd_input: region shape differs from volume");
  }
  Tensor x({2, h, w});
  for (int c = 0; c < 2; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        if (region && !(*region)(y, xx)) continue;
        for (int b = 0; b < volume.bins(); ++b) {
          if (volume.at(b, c, y, xx) > 0) {
            x.at(c, y, xx) = 1.0;
            break;
          }
        }
      }
    }
  }
  return x;
}

int active_pixels(const neuro::Tensor& input) {
  const int c = input.shape[0], h = input.shape[1], w = input.shape[2];
  int n = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        if (input.at(k, y, x) != 0.0) {
          ++n;
          break;
        }
      }
    }
  }
  return n;
}

OfpdModel::OfpdModel(OfpdConfig config, std::uint64_t seed) : config_(config) {
  const auto& c = config_;
  if (c.height % 4 != 0 || c.width % 4 != 0) throw std::invalid_argument("OFPD input size must be a multiple of 4");
  if (c.conv1_kernel % 2 == 0 || c.conv2_kernel % 2 == 0) throw std::invalid_argument("OFPD kernels must be odd");
  input_shape_ = {c.in_channels, c.height, c.width};
  Rng rng(seed);
  const int k1 = c.conv1_kernel, k2 = c.conv2_kernel;
  const int flat = c.conv2_channels * (c.height / 4) * (c.width / 4);
  conv1_w = uniform_param("conv1.weight", {c.conv1_channels, c.in_channels, k1, k1}, c.in_channels * k1 * k1, rng);
  conv1_b = Parameter("conv1.bias", Tensor({c.conv1_channels}));
  conv2_w = uniform_param("conv2.weight", {c.conv2_channels, c.conv1_channels, k2, k2}, c.conv1_channels * k2 * k2, rng);
  conv2_b = Parameter("conv2.bias", Tensor({c.conv2_channels}));
  fc_w = uniform_param("fc.weight", {c.hidden, flat}, flat, rng);
  fc_b = Parameter("fc.bias", Tensor({c.hidden}));
  pose_w = uniform_param("pose.weight", {2, c.hidden}, c.hidden, rng);
  pose_b = Parameter("pose.bias", Tensor({2}, {0.5, 0.5}));
  dir_w = uniform_param("direction.weight", {2, c.hidden}, c.hidden, rng);
  dir_b = Parameter("direction.bias", Tensor({2}));
}

std::vector<neuro::Parameter*> OfpdModel::parameters() {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b, &pose_w, &pose_b, &dir_w, &dir_b};
}

OfpdHeads OfpdModel::forward(neuro::Tape& tape, const neuro::Tensor& input) {
  if (input.shape != input_shape_) {
    throw std::invalid_argument("OFPD: input " + neuro::shape_string(input.shape) + ", expected " +
                                neuro::shape_string(input_shape_));
  }
  using namespace neuro;
  Var x = tape.constant(input);
  Var h1 = relu(conv2d(x, tape.parameter(conv1_w), tape.parameter(conv1_b), {2, config_.conv1_kernel / 2}));
  Var h2 = relu(conv2d(h1, tape.parameter(conv2_w), tape.parameter(conv2_b), {2, config_.conv2_kernel / 2}));
  Var flat = reshape(h2, {static_cast<int>(h2.size())});
  Var trunk = relu(linear(flat, tape.parameter(fc_w), tape.parameter(fc_b)));
  return {linear(trunk, tape.parameter(pose_w), tape.parameter(pose_b)),
          linear(trunk, tape.parameter(dir_w), tape.parameter(dir_b))};
}

OfpdPrediction OfpdModel::predict(const neuro::Tensor& input) {
  neuro::Tape tape;
  const OfpdHeads heads = forward(tape, input);
  const Tensor& pose = heads.pose.value();
  const Tensor& dir = heads.direction.value();
  OfpdPrediction p;
  p.center = {pose[0] * config_.width, pose[1] * config_.height};
  p.direction = wrap_angle(std::atan2(dir[1], dir[0]));
  p.low_confidence = active_pixels(input) < config_.min_active_pixels;
  return p;
}

void OfpdModel::round_to_float() {
  for (Parameter* p : parameters()) {
    for (double& v : p->value.data) v = static_cast<double>(static_cast<float>(v));
  }
}

neuro::Checkpoint OfpdModel::to_checkpoint() const {
  neuro::Checkpoint ck;
  ck.kind = "ofpd";
  const auto& c = config_;
  ck.metadata = {{"height", std::to_string(c.height)},
                 {"width", std::to_string(c.width)},
                 {"in_channels", std::to_string(c.in_channels)},
                 {"conv1_channels", std::to_string(c.conv1_channels)},
                 {"conv1_kernel", std::to_string(c.conv1_kernel)},
                 {"conv2_channels", std::to_string(c.conv2_channels)},
                 {"conv2_kernel", std::to_string(c.conv2_kernel)},
                 {"hidden", std::to_string(c.hidden)},
                 {"min_active_pixels", std::to_string(c.min_active_pixels)}};
  for (const Parameter* p : {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b, &pose_w, &pose_b, &dir_w, &dir_b}) {
    ck.add(*p);
  }
  return ck;
}

OfpdModel OfpdModel::from_checkpoint(const neuro::Checkpoint& ck) {
  if (ck.kind != "ofpd") throw neuro::CheckpointError("expected an OFPD checkpoint, got '" + ck.kind + "'");
  OfpdConfig c;
  c.height = std::stoi(ck.meta("height"));
  c.width = std::stoi(ck.meta("width"));
  c.in_channels = std::stoi(ck.meta("in_channels"));
  c.conv1_channels = std::stoi(ck.meta("conv1_channels"));
  c.conv1_kernel = std::stoi(ck.meta("conv1_kernel"));
  c.conv2_channels = std::stoi(ck.meta("conv2_channels"));
  c.conv2_kernel = std::stoi(ck.meta("conv2_kernel"));
  c.hidden = std::stoi(ck.meta("hidden"));
  c.min_active_pixels = std::stoi(ck.meta("min_active_pixels"));
  OfpdModel model(c, 0);
  for (Parameter* p : model.parameters()) ck.load_into(*p);
  return model;
}

}  // namespace toffe::models
