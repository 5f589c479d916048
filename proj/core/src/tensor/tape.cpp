#include "hmer/tensor/tape.hpp"

#include "hmer/error.hpp"

namespace hmer::tensor {

template <typename T>
Var Tape<T>::leaf(Tensor<T> value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
const typename Tape<T>::Node& Tape<T>::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) throw ArgumentError("variable does not belong to this tape");
  return nodes_[v.id];
}

template <typename T>
const Tensor<T>& Tape<T>::value(Var v) const {
  return node(v).value;
}

template <typename T>
bool Tape<T>::requires_grad(Var v) const {
  return node(v).requires_grad;
}

template <typename T>
const char* Tape<T>::op_name(Var v) const {
  return node(v).op;
}

template <typename T>
Tensor<T>& Tape<T>::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.shape() != n.value.shape() || n.grad.size() != n.value.size()) {
    n.grad = Tensor<T>(n.value.shape());
  }
  return n.grad;
}

template <typename T>
const Tensor<T>& Tape<T>::grad(Var v) {
  node(v);
  return grad_buffer(v.id);
}

template <typename T>
Var Tape<T>::record(const char* op, Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn backward) {
  return record(op, std::move(value), std::vector<Var>(inputs), std::move(backward));
}

template <typename T>
Var Tape<T>::record(const char* op, Tensor<T> value, const std::vector<Var>& inputs, BackwardFn backward) {
  if (!value.all_finite()) {
    throw NumericError(std::string("non-finite value produced by ") + op);
  }
  bool needs = false;
  for (Var in : inputs) needs = needs || node(in).requires_grad;
  Node n;
  n.op = op;
  n.value = std::move(value);
  n.requires_grad = needs;
  if (needs) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
void Tape<T>::backward(Var loss) {
  const Node& target = node(loss);
  if (target.value.size() != 1) {
    throw ShapeError("backward requires a scalar loss, got shape " + to_string(target.value.shape()));
  }
  for (Node& n : nodes_) n.grad = Tensor<T>();
  grad_buffer(loss.id)[0] = T{1};
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward || n.grad.empty()) continue;
    n.backward(*this, i);
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace hmer::tensor
