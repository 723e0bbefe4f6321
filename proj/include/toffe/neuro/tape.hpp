#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "toffe/neuro/tensor.hpp"

namespace toffe::neuro {

/// A trainable array with its accumulated gradient and box constraints that
/// the optimizer enforces after every update.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  Parameter() = default;
  Parameter(std::string n, Tensor v, double lo = -std::numeric_limits<double>::infinity(),
            double hi = std::numeric_limits<double>::infinity());

  void zero_grad() { grad.fill(0.0); }
};

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const;
  int id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape; }
  std::size_t size() const { return value().size(); }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Reverse-mode recording of one forward computation.
///
/// Nodes are appended in evaluation order, which is a topological order of the
/// graph, so backward() walks them from the loss towards the leaves and runs
/// each node's pullback once. Parameter leaves read their value from, and
/// accumulate their gradient into, the Parameter they were created from.
class Tape {
 public:
  using Pullback = std::function<void(Tape&, const std::vector<double>& upstream)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var parameter(Parameter& p);
  /// Records the result of an op. `pullback` receives d(loss)/d(result) and
  /// adds into grad() of the inputs that require gradients.
  Var record(Tensor value, std::initializer_list<Var> inputs, Pullback pullback);

  const Tensor& value(const Var& v) const;
  bool requires_grad(const Var& v) const;
  /// Gradient buffer of a node, zero-initialised on first access.
  std::vector<double>& grad(const Var& v);

  /// Seeds d(loss)/d(loss) = 1 and propagates to every parameter leaf.
  void backward(const Var& loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Parameter* param = nullptr;
    std::vector<double> grad;
    Pullback pullback;
    bool requires_grad = false;
  };

  Node& node(const Var& v);
  const Node& node(const Var& v) const;

  std::deque<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace toffe::neuro
