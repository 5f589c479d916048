#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hmer/tensor/tape.hpp"

// Differentiable primitives. Every op reads its inputs from the tape, appends
// one node, and throws ShapeError naming the op and the offending shapes when
// the inputs are incompatible.
namespace hmer::tensor {

/// [m,k] x [k,n] -> [m,n]
template <typename T>
Var matmul(Tape<T>& tape, Var a, Var b);

/// Elementwise sum. `b` may also be a trailing-shape bias broadcast over the
/// leading axes of `a` (e.g. [n] or [1,n] added to [m,n]).
template <typename T>
Var add(Tape<T>& tape, Var a, Var b);

/// Elementwise product. `b` may also be [rows] or [rows,1], scaling each
/// axis-0 slice of `a`.
template <typename T>
Var mul(Tape<T>& tape, Var a, Var b);

template <typename T>
Var scale(Tape<T>& tape, Var a, T factor);

template <typename T>
Var concat(Tape<T>& tape, std::span<const Var> parts, std::size_t axis);

template <typename T>
Var concat(Tape<T>& tape, std::initializer_list<Var> parts, std::size_t axis) {
  return concat(tape, std::span<const Var>(parts.begin(), parts.size()), axis);
}

/// Reduces `axis` away.
template <typename T>
Var sum(Tape<T>& tape, Var a, std::size_t axis);

template <typename T>
Var mean(Tape<T>& tape, Var a, std::size_t axis);

/// Sum of every element as a rank-0 tensor.
template <typename T>
Var sum_all(Tape<T>& tape, Var a);

template <typename T>
Var relu(Tape<T>& tape, Var a);

template <typename T>
Var leaky_relu(Tape<T>& tape, Var a, T slope);

template <typename T>
Var reshape(Tape<T>& tape, Var a, Shape shape);

struct Conv1dOptions {
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t groups = 1;
};

/// x: [batch, c_in, length], weight: [c_out, c_in/groups, kernel],
/// bias: [c_out] or an invalid Var. Output length is
/// floor((length + 2*padding - kernel) / stride) + 1.
template <typename T>
Var conv1d(Tape<T>& tape, Var x, Var weight, Var bias, Conv1dOptions options = {});

/// Average pooling along the last axis.
template <typename T>
Var avg_pool1d(Tape<T>& tape, Var x, std::size_t kernel, std::size_t stride);

/// Inverted dropout; identity when `training` is false or rate is 0.
/// The keep mask is a pure function of `seed`.
template <typename T>
Var dropout(Tape<T>& tape, Var x, double rate, std::uint64_t seed, bool training);

/// Selects axis-0 slices: out[k] = x[rows[k]].
template <typename T>
Var gather_rows(Tape<T>& tape, Var x, std::span<const std::size_t> rows);

/// Transpose of gather_rows: out[rows[k]] += x[k], out has `out_rows` slices.
template <typename T>
Var scatter_add_rows(Tape<T>& tape, Var x, std::span<const std::size_t> rows, std::size_t out_rows);

/// Softmax along `axis` restricted to entries whose mask byte is nonzero.
/// Masked entries get probability 0; a fully masked lane is all zeros.
template <typename T>
Var masked_softmax(Tape<T>& tape, Var logits, std::span<const std::uint8_t> mask, std::size_t axis);

/// sum_r weight[r] * -log softmax(logits[r])[label[r]] for logits [rows, classes].
/// Rows with zero weight are skipped entirely, label included.
template <typename T>
Var cross_entropy(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const T> weights);

/// sum_r weight[r] * -(1 - p_t)^gamma * log p_t, p_t = softmax(logits[r])[label[r]].
template <typename T>
Var focal_loss(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const T> weights, T gamma);

/// x [.., in] * w [in, out] + b [out]
template <typename T>
Var linear(Tape<T>& tape, Var x, Var weight, Var bias) {
  Var y = matmul(tape, x, weight);
  return bias.valid() ? add(tape, y, bias) : y;
}

}  // namespace hmer::tensor
