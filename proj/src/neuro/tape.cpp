#include "toffe/neuro/tape.hpp"

namespace toffe::neuro {

Parameter::Parameter(std::string n, Tensor v, double lo, double hi)
    : name(std::move(n)), value(std::move(v)), grad(value.shape), lower(lo), upper(hi) {}

Tape& Var::tape() const {
  if (!tape_) throw std::logic_error("Var: not attached to a tape");
  return *tape_;
}

const Tensor& Var::value() const { return tape().value(*this); }

Tape::Node& Tape::node(const Var& v) {
  if (v.tape_ != this || v.id_ < 0 || static_cast<std::size_t>(v.id_) >= nodes_.size()) {
    throw std::logic_error("Tape: variable does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(v.id_)];
}

const Tape::Node& Tape::node(const Var& v) const {
  if (v.tape_ != this || v.id_ < 0 || static_cast<std::size_t>(v.id_) >= nodes_.size()) {
    throw std::logic_error("Tape: variable does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(v.id_)];
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::parameter(Parameter& p) {
  if (p.grad.shape != p.value.shape) p.grad = Tensor(p.value.shape);
  Node n;
  n.param = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, Pullback pullback) {
  Node n;
  n.value = std::move(value);
  for (const Var& in : inputs) {
    if (requires_grad(in)) n.requires_grad = true;
  }
  if (n.requires_grad) n.pullback = std::move(pullback);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

const Tensor& Tape::value(const Var& v) const {
  const Node& n = node(v);
  return n.param ? n.param->value : n.value;
}

bool Tape::requires_grad(const Var& v) const { return node(v).requires_grad; }

std::vector<double>& Tape::grad(const Var& v) {
  Node& n = node(v);
  if (n.param) return n.param->grad.data;
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

void Tape::backward(const Var& loss) {
  if (nodes_.empty() || !loss.valid()) {
    throw std::logic_error("Tape::backward: nothing has been recorded");
  }
  if (backward_done_) throw std::logic_error("Tape::backward: already run on this tape");
  Node& root = node(loss);
  if (value(loss).size() != 1) {
    throw std::logic_error("Tape::backward: loss must be a scalar");
  }
  backward_done_ = true;
  if (!root.requires_grad) return;
  grad(loss)[0] += 1.0;
  for (int i = loss.id(); i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.requires_grad || !n.pullback || n.grad.empty()) continue;
    n.pullback(*this, n.grad);
    n.pullback = nullptr;
  }
}

}  // namespace toffe::neuro
