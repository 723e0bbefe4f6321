#include "toffe/models/train.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "toffe/neuro/ops.hpp"
#include "toffe/neuro/optim.hpp"
#include "toffe/sim/random.hpp"

namespace toffe::models {

using neuro::Parameter;
using neuro::Tape;
using neuro::Tensor;
using neuro::Var;

namespace {

double angle_error_deg(double a, double b) { return std::abs(wrap_angle(a - b)) * 180.0 / kPi; }

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

// Runs `epochs` passes of minibatch descent. loss_of(tape, i) records the loss
// of training example i; validate() fills the validation fields of a record.
template <class LossFn, class ValidateFn>
TrainLog fit(std::vector<Parameter*> params, std::size_t n_train, const TrainConfig& config, LossFn loss_of,
             ValidateFn validate, const char* what) {
  if (config.epochs < 0 || config.batch < 1 || !(config.lr > 0.0)) {
    throw std::invalid_argument(fmt::format("{}: invalid hyperparameters", what));
  }
  Rng rng(config.seed);
  neuro::Adam adam(config.lr);
  TrainLog log;
  EpochRecord start;
  validate(start);
  log.epochs.push_back(start);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = shuffled(n_train, rng);
    double sum = 0.0;
    for (std::size_t b = 0; b < n_train; b += config.batch) {
      const std::size_t end = std::min(n_train, b + static_cast<std::size_t>(config.batch));
      neuro::zero_grads(params);
      for (std::size_t j = b; j < end; ++j) {
        Tape tape;
        Var loss = loss_of(tape, order[j]);
        const double value = loss.value()[0];
        if (!std::isfinite(value)) {
          throw TrainingDiverged(fmt::format("{}: non-finite loss at epoch {}, example {}", what, epoch, order[j]));
        }
        sum += value;
        tape.backward(neuro::multiply_constant(loss, 1.0 / static_cast<double>(end - b)));
      }
      try {
        if (config.optimizer == OptimizerKind::Adam) {
          adam.step(params);
        } else {
          neuro::sgd_step(params, config.lr);
        }
      } catch (const std::domain_error& e) {
        throw TrainingDiverged(fmt::format("{}: epoch {}: {}", what, epoch, e.what()));
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = n_train ? sum / static_cast<double>(n_train) : 0.0;
    validate(rec);
    if (!std::isfinite(rec.val_loss)) {
      throw TrainingDiverged(fmt::format("{}: non-finite validation loss after epoch {}", what, epoch));
    }
    log.epochs.push_back(rec);
  }
  return log;
}

}  // namespace

BinaryGrid ofs_support(const BinnedVolume& volume, int kernel) {
  const int h = volume.height(), w = volume.width(), r = kernel / 2;
  BinaryGrid occ(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) occ.set(y, x, volume.pixel_total(y, x) > 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!occ(y, x)) continue;
      for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
        for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) out.set(yy, xx, true);
    }
  }
  return out;
}

neuro::Var ofs_loss(neuro::Tape& tape, OfsModel& model, const OfsExample& example, OfsLossWeights weights) {
  const BinaryGrid support = ofs_support(example.input, model.config().kernel);
  const BinaryGrid events = occupancy(example.input);
  const int h = example.input.height(), w = example.input.width();
  Tensor target({1, h, w}), weight({1, h, w});
  for (std::size_t i = 0; i < support.size(); ++i) {
    target[i] = example.target[i];
    weight[i] = (events[i] ? 1.0 : support[i] * weights.rim) * (target[i] == 0.0 ? weights.negative : 1.0);
  }
  return neuro::bce_with_logits(model.logits(tape, example.input), target, weight);
}

double ofs_loss_value(OfsModel& model, const OfsExample& example, OfsLossWeights weights) {
  Tape tape;
  return ofs_loss(tape, model, example, weights).value()[0];
}

neuro::Var ofpd_loss(neuro::Tape& tape, OfpdModel& model, const OfpdExample& example) {
  const OfpdHeads heads = model.forward(tape, example.input);
  const auto& c = model.config();
  Tensor pose({2}, {example.center.x / c.width, example.center.y / c.height});
  Tensor dir({2}, {std::cos(example.direction), std::sin(example.direction)});
  return neuro::add(neuro::mse(heads.pose, pose), neuro::multiply_constant(neuro::mse(heads.direction, dir), c.beta));
}

OfpdScore score_ofpd(OfpdModel& model, const std::vector<OfpdExample>& examples) {
  OfpdScore s;
  if (examples.empty()) return s;
  for (const OfpdExample& ex : examples) {
    Tape tape;
    s.loss += ofpd_loss(tape, model, ex).value()[0];
    const OfpdPrediction p = model.predict(ex.input);
    s.pix_error += std::hypot(p.center.x - ex.center.x, p.center.y - ex.center.y);
    s.dir_error += angle_error_deg(p.direction, ex.direction);
  }
  const double n = static_cast<double>(examples.size());
  s.loss /= n;
  s.pix_error /= n;
  s.dir_error /= n;
  return s;
}

TrainLog train_ofs(OfsModel& model, const std::vector<OfsExample>& train, const std::vector<OfsExample>& val,
                   const TrainConfig& config) {
  auto validate = [&](EpochRecord& rec) {
    double loss = 0.0;
    std::size_t spiking = 0, cells = 0;
    for (const OfsExample& ex : val) {
      loss += ofs_loss_value(model, ex, {config.rim_weight, config.negative_weight});
      const OfsOutput out = model.forward(ex.input);
      spiking += out.aggregate.count();
      cells += out.aggregate.size();
    }
    rec.val_loss = val.empty() ? 0.0 : loss / static_cast<double>(val.size());
    rec.spike_rate = cells ? static_cast<double>(spiking) / static_cast<double>(cells) : 0.0;
  };
  auto loss_of = [&](Tape& tape, std::size_t i) { return ofs_loss(tape, model, train[i], {config.rim_weight, config.negative_weight});
  };
  return fit(model.parameters(), train.size(), config, loss_of, validate, "train_ofs");
}

TrainLog train_ofpd(OfpdModel& model, const std::vector<OfpdExample>& train,
                    const std::vector<OfpdExample>& val, const TrainConfig& config) {
  auto validate = [&](EpochRecord& rec) {
    const OfpdScore s = score_ofpd(model, val);
    rec.val_loss = s.loss;
    rec.pix_error = s.pix_error;
    rec.dir_error = s.dir_error;
  };
  auto loss_of = [&](Tape& tape, std::size_t i) { return ofpd_loss(tape, model, train[i]); };
  return fit(model.parameters(), train.size(), config, loss_of, validate, "train_ofpd");
}

void write_training_curve(const std::filesystem::path& path, const TrainLog& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,train_loss,val_loss,pix_error,dir_error,spike_rate\n";
  for (const EpochRecord& r : log.epochs) {
    out << fmt::format("{},{},{},{},{},{}\n", r.epoch, r.train_loss, r.val_loss, r.pix_error, r.dir_error,
                       r.spike_rate);
  }
}

}  // namespace toffe::models
