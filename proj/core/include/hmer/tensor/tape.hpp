#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "hmer/tensor/tensor.hpp"

namespace hmer::tensor {

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
  bool valid() const noexcept { return id != static_cast<std::size_t>(-1); }
};

/// Reverse-mode recorder. Every op appends one node holding its forward value
/// and a closure that pushes the node's gradient into its inputs. Nodes are
/// only ever appended, so execution order is a topological order and backward
/// simply walks the list in reverse.
///
/// A tape is single-threaded; use one per forward/backward pass.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) noexcept = default;
  Tape& operator=(Tape&&) noexcept = default;

  Var leaf(Tensor<T> value, bool requires_grad = false);
  Var constant(Tensor<T> value) { return leaf(std::move(value), false); }

  const Tensor<T>& value(Var v) const;
  bool requires_grad(Var v) const;
  const char* op_name(Var v) const;
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Gradient of the last backward() target with respect to v. Zero-filled
  /// when v did not contribute.
  const Tensor<T>& grad(Var v);

  /// Runs reverse accumulation from a scalar (single-element) node.
  void backward(Var loss);

  /// Records an op result. `backward` may be empty when no input needs a
  /// gradient; the finiteness of `value` is checked here.
  Var record(const char* op, Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(const char* op, Tensor<T> value, const std::vector<Var>& inputs, BackwardFn backward);

  /// Accumulation target for op backward closures; allocates on first use.
  Tensor<T>& grad_buffer(std::size_t id);
  const Tensor<T>& grad_of(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    const char* op = "leaf";
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  const Node& node(Var v) const;

  std::vector<Node> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace hmer::tensor
