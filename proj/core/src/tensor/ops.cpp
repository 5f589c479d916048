#include "hmer/tensor/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hmer/error.hpp"

namespace hmer::tensor {
namespace {

template <typename T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

[[noreturn]] void shape_fail(const char* op, const std::string& detail) {
  throw ShapeError(std::string(op) + ": " + detail);
}

std::string shapes(const Shape& a, const Shape& b) { return to_string(a) + " vs " + to_string(b); }

// Splits a shape around `axis` into (outer, len, inner).
struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisSplit split_axis(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.len = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

// True when `b` (with leading unit axes dropped) equals the trailing axes of `a`.
bool is_trailing_broadcast(const Shape& a, const Shape& b) {
  std::size_t first = 0;
  while (first < b.size() && b[first] == 1 && b.size() - first > 1) ++first;
  const std::size_t n = b.size() - first;
  if (n == 0 || n > a.size()) return false;
  return std::equal(b.begin() + static_cast<std::ptrdiff_t>(first), b.end(),
                    a.end() - static_cast<std::ptrdiff_t>(n));
}

// Deterministic uniform in [0,1) independent of the standard library's
// distribution implementations.
double unit_uniform(std::uint64_t& state) {
  // splitmix64
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

template <typename T>
Var matmul(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(1) != bv.dim(0)) {
    shape_fail("matmul", shapes(av.shape(), bv.shape()));
  }
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  Tensor<T> out(Shape{m, n});
  if (m && n && k) {
    MatMap<T>(out.data(), m, n).noalias() = ConstMatMap<T>(av.data(), m, k) * ConstMatMap<T>(bv.data(), k, n);
  }
  return tape.record("matmul", std::move(out), {a, b}, [a, b, m, k, n](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    if (!m || !n || !k) return;
    ConstMatMap<T> gm(g.data(), m, n);
    if (t.requires_grad(a)) {
      auto& ga = t.grad_buffer(a.id);
      MatMap<T>(ga.data(), m, k).noalias() += gm * ConstMatMap<T>(t.value(b).data(), k, n).transpose();
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad_buffer(b.id);
      MatMap<T>(gb.data(), k, n).noalias() += ConstMatMap<T>(t.value(a).data(), m, k).transpose() * gm;
    }
  });
}

template <typename T>
Var add(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  Tensor<T> out = av;
  if (av.shape() == bv.shape()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return tape.record("add", std::move(out), {a, b}, [a, b](Tape<T>& t, std::size_t self) {
      const auto& g = t.grad_of(self);
      for (Var v : {a, b}) {
        if (!t.requires_grad(v)) continue;
        auto& gv = t.grad_buffer(v.id);
        for (std::size_t i = 0; i < g.size(); ++i) gv[i] += g[i];
      }
    });
  }
  if (!is_trailing_broadcast(av.shape(), bv.shape())) shape_fail("add", shapes(av.shape(), bv.shape()));
  const std::size_t inner = bv.size();
  const std::size_t outer = av.size() / inner;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < inner; ++i) out[o * inner + i] += bv[i];
  return tape.record("add", std::move(out), {a, b}, [a, b, outer, inner](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    if (t.requires_grad(a)) {
      auto& ga = t.grad_buffer(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad_buffer(b.id);
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) gb[i] += g[o * inner + i];
    }
  });
}

template <typename T>
Var mul(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  Tensor<T> out = av;
  if (av.shape() == bv.shape()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return tape.record("mul", std::move(out), {a, b}, [a, b](Tape<T>& t, std::size_t self) {
      const auto& g = t.grad_of(self);
      const auto& x = t.value(a);
      const auto& y = t.value(b);
      if (t.requires_grad(a)) {
        auto& ga = t.grad_buffer(a.id);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
      }
      if (t.requires_grad(b)) {
        auto& gb = t.grad_buffer(b.id);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
      }
    });
  }
  const bool row_scale = av.rank() >= 1 && bv.size() == av.dim(0) &&
                         (bv.rank() == 1 || (bv.rank() == 2 && bv.dim(1) == 1));
  if (!row_scale) shape_fail("mul", shapes(av.shape(), bv.shape()));
  const std::size_t rows = av.dim(0);
  const std::size_t width = rows ? av.size() / rows : 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < width; ++c) out[r * width + c] *= bv[r];
  return tape.record("mul", std::move(out), {a, b}, [a, b, rows, width](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    const auto& x = t.value(a);
    const auto& y = t.value(b);
    if (t.requires_grad(a)) {
      auto& ga = t.grad_buffer(a.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < width; ++c) ga[r * width + c] += g[r * width + c] * y[r];
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad_buffer(b.id);
      for (std::size_t r = 0; r < rows; ++r) {
        T acc{0};
        for (std::size_t c = 0; c < width; ++c) acc += g[r * width + c] * x[r * width + c];
        gb[r] += acc;
      }
    }
  });
}

template <typename T>
Var scale(Tape<T>& tape, Var a, T factor) {
  Tensor<T> out = tape.value(a);
  for (auto& v : out.values()) v *= factor;
  return tape.record("scale", std::move(out), {a}, [a, factor](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_buffer(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
  });
}

template <typename T>
Var concat(Tape<T>& tape, std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) shape_fail("concat", "no inputs");
  const Shape& first = tape.value(parts[0]).shape();
  if (axis >= first.size()) shape_fail("concat", "axis " + std::to_string(axis) + " for shape " + to_string(first));
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> chunk(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Shape& s = tape.value(parts[p]).shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) ok = d == axis || s[d] == first[d];
    if (!ok) shape_fail("concat", shapes(first, s));
    out_shape[axis] += s[axis];
  }
  const AxisSplit split = split_axis(out_shape, axis);
  for (std::size_t p = 0; p < parts.size(); ++p) chunk[p] = tape.value(parts[p]).dim(axis) * split.inner;
  const std::size_t out_chunk = split.len * split.inner;
  Tensor<T> out(out_shape);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& v = tape.value(parts[p]);
    for (std::size_t o = 0; o < split.outer; ++o) {
      std::copy_n(v.data() + o * chunk[p], chunk[p], out.data() + o * out_chunk + offset);
    }
    offset += chunk[p];
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tape.record("concat", std::move(out), inputs,
                     [inputs, chunk, outer = split.outer, out_chunk](Tape<T>& t, std::size_t self) {
                       const auto& g = t.grad_of(self);
                       std::size_t off = 0;
                       for (std::size_t p = 0; p < inputs.size(); ++p) {
                         if (t.requires_grad(inputs[p])) {
                           auto& gp = t.grad_buffer(inputs[p].id);
                           for (std::size_t o = 0; o < outer; ++o)
                             for (std::size_t i = 0; i < chunk[p]; ++i) gp[o * chunk[p] + i] += g[o * out_chunk + off + i];
                         }
                         off += chunk[p];
                       }
                     });
}

namespace {

template <typename T>
Var reduce_axis(Tape<T>& tape, Var a, std::size_t axis, bool average, const char* name) {
  const auto& av = tape.value(a);
  if (axis >= av.rank()) shape_fail(name, "axis " + std::to_string(axis) + " for shape " + to_string(av.shape()));
  const AxisSplit s = split_axis(av.shape(), axis);
  Shape out_shape = av.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  Tensor<T> out(out_shape);
  const T factor = average && s.len ? T{1} / static_cast<T>(s.len) : T{1};
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t l = 0; l < s.len; ++l)
      for (std::size_t i = 0; i < s.inner; ++i) out[o * s.inner + i] += av[(o * s.len + l) * s.inner + i];
  if (average)
    for (auto& v : out.values()) v *= factor;
  return tape.record(name, std::move(out), {a}, [a, s, factor](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_buffer(a.id);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t l = 0; l < s.len; ++l)
        for (std::size_t i = 0; i < s.inner; ++i) ga[(o * s.len + l) * s.inner + i] += g[o * s.inner + i] * factor;
  });
}

}  // namespace

template <typename T>
Var sum(Tape<T>& tape, Var a, std::size_t axis) {
  return reduce_axis(tape, a, axis, false, "sum");
}

template <typename T>
Var mean(Tape<T>& tape, Var a, std::size_t axis) {
  return reduce_axis(tape, a, axis, true, "mean");
}

template <typename T>
Var sum_all(Tape<T>& tape, Var a) {
  const auto& av = tape.value(a);
  T acc{0};
  for (T v : av.values()) acc += v;
  return tape.record("sum_all", Tensor<T>::scalar(acc), {a}, [a](Tape<T>& t, std::size_t self) {
    const T g = t.grad_of(self)[0];
    auto& ga = t.grad_buffer(a.id);
    for (auto& v : ga.values()) v += g;
  });
}

template <typename T>
Var leaky_relu(Tape<T>& tape, Var a, T slope) {
  Tensor<T> out = tape.value(a);
  for (auto& v : out.values()) v = v > T{0} ? v : v * slope;
  return tape.record(slope == T{0} ? "relu" : "leaky_relu", std::move(out), {a}, [a, slope](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    const auto& x = t.value(a);
    auto& ga = t.grad_buffer(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += x[i] > T{0} ? g[i] : g[i] * slope;
  });
}

template <typename T>
Var relu(Tape<T>& tape, Var a) {
  return leaky_relu(tape, a, T{0});
}

template <typename T>
Var reshape(Tape<T>& tape, Var a, Shape shape) {
  const auto& av = tape.value(a);
  if (element_count(shape) != av.size()) shape_fail("reshape", shapes(av.shape(), shape));
  return tape.record("reshape", av.reshaped(std::move(shape)), {a}, [a](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_buffer(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

template <typename T>
Var conv1d(Tape<T>& tape, Var x, Var weight, Var bias, Conv1dOptions opt) {
  const auto& xv = tape.value(x);
  const auto& wv = tape.value(weight);
  if (xv.rank() != 3 || wv.rank() != 3 || opt.groups == 0 || opt.stride == 0) {
    shape_fail("conv1d", shapes(xv.shape(), wv.shape()));
  }
  const std::size_t batch = xv.dim(0), c_in = xv.dim(1), len = xv.dim(2);
  const std::size_t c_out = wv.dim(0), k = wv.dim(2), g = opt.groups;
  if (c_in % g || c_out % g || wv.dim(1) != c_in / g || len + 2 * opt.padding < k) {
    shape_fail("conv1d", "input " + to_string(xv.shape()) + " weight " + to_string(wv.shape()) + " groups " +
                             std::to_string(g));
  }
  if (bias.valid() && tape.value(bias).shape() != Shape{c_out}) {
    shape_fail("conv1d", "bias " + to_string(tape.value(bias).shape()) + " for " + std::to_string(c_out) + " channels");
  }
  const std::size_t out_len = (len + 2 * opt.padding - k) / opt.stride + 1;
  const std::size_t cin_g = c_in / g, cout_g = c_out / g;
  const bool pointwise = k == 1 && opt.stride == 1 && opt.padding == 0 && g == 1;

  Tensor<T> out(Shape{batch, c_out, out_len});
  if (pointwise) {
    ConstMatMap<T> w(wv.data(), c_out, c_in);
    for (std::size_t n = 0; n < batch; ++n) {
      MatMap<T>(out.data() + n * c_out * len, c_out, len).noalias() =
          w * ConstMatMap<T>(xv.data() + n * c_in * len, c_in, len);
    }
  } else {
    for (std::size_t n = 0; n < batch; ++n)
      for (std::size_t co = 0; co < c_out; ++co) {
        const std::size_t grp = co / cout_g;
        T* o = out.data() + (n * c_out + co) * out_len;
        for (std::size_t ci = 0; ci < cin_g; ++ci) {
          const T* in = xv.data() + (n * c_in + grp * cin_g + ci) * len;
          const T* w = wv.data() + (co * cin_g + ci) * k;
          for (std::size_t p = 0; p < out_len; ++p) {
            const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(p * opt.stride) - static_cast<std::ptrdiff_t>(opt.padding);
            T acc{0};
            for (std::size_t j = 0; j < k; ++j) {
              const std::ptrdiff_t pos = start + static_cast<std::ptrdiff_t>(j);
              if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(len)) acc += w[j] * in[pos];
            }
            o[p] += acc;
          }
        }
      }
  }
  if (bias.valid()) {
    const auto& bv = tape.value(bias);
    for (std::size_t n = 0; n < batch; ++n)
      for (std::size_t co = 0; co < c_out; ++co) {
        T* o = out.data() + (n * c_out + co) * out_len;
        for (std::size_t p = 0; p < out_len; ++p) o[p] += bv[co];
      }
  }
  std::vector<Var> inputs{x, weight};
  if (bias.valid()) inputs.push_back(bias);
  return tape.record(
      "conv1d", std::move(out), inputs,
      [=](Tape<T>& t, std::size_t self) {
        const auto& go = t.grad_of(self);
        const auto& xin = t.value(x);
        const auto& win = t.value(weight);
        const bool need_x = t.requires_grad(x), need_w = t.requires_grad(weight);
        if (bias.valid() && t.requires_grad(bias)) {
          auto& gb = t.grad_buffer(bias.id);
          for (std::size_t n = 0; n < batch; ++n)
            for (std::size_t co = 0; co < c_out; ++co) {
              const T* gp = go.data() + (n * c_out + co) * out_len;
              T acc{0};
              for (std::size_t p = 0; p < out_len; ++p) acc += gp[p];
              gb[co] += acc;
            }
        }
        if (pointwise) {
          ConstMatMap<T> w(win.data(), c_out, c_in);
          if (need_x) {
            auto& gx = t.grad_buffer(x.id);
            for (std::size_t n = 0; n < batch; ++n)
              MatMap<T>(gx.data() + n * c_in * len, c_in, len).noalias() +=
                  w.transpose() * ConstMatMap<T>(go.data() + n * c_out * len, c_out, len);
          }
          if (need_w) {
            auto& gw = t.grad_buffer(weight.id);
            MatMap<T> gwm(gw.data(), c_out, c_in);
            for (std::size_t n = 0; n < batch; ++n)
              gwm.noalias() += ConstMatMap<T>(go.data() + n * c_out * len, c_out, len) *
                               ConstMatMap<T>(xin.data() + n * c_in * len, c_in, len).transpose();
          }
          return;
        }
        Tensor<T>* gx = need_x ? &t.grad_buffer(x.id) : nullptr;
        Tensor<T>* gw = need_w ? &t.grad_buffer(weight.id) : nullptr;
        for (std::size_t n = 0; n < batch; ++n)
          for (std::size_t co = 0; co < c_out; ++co) {
            const std::size_t grp = co / cout_g;
            const T* gp = go.data() + (n * c_out + co) * out_len;
            for (std::size_t ci = 0; ci < cin_g; ++ci) {
              const std::size_t in_off = (n * c_in + grp * cin_g + ci) * len;
              const std::size_t w_off = (co * cin_g + ci) * k;
              for (std::size_t p = 0; p < out_len; ++p) {
                const std::ptrdiff_t start =
                    static_cast<std::ptrdiff_t>(p * opt.stride) - static_cast<std::ptrdiff_t>(opt.padding);
                for (std::size_t j = 0; j < k; ++j) {
                  const std::ptrdiff_t pos = start + static_cast<std::ptrdiff_t>(j);
                  if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(len)) continue;
                  if (gx) (*gx)[in_off + static_cast<std::size_t>(pos)] += gp[p] * win[w_off + j];
                  if (gw) (*gw)[w_off + j] += gp[p] * xin[in_off + static_cast<std::size_t>(pos)];
                }
              }
            }
          }
      });
}

template <typename T>
Var avg_pool1d(Tape<T>& tape, Var x, std::size_t kernel, std::size_t stride) {
  const auto& xv = tape.value(x);
  if (xv.rank() == 0 || kernel == 0 || stride == 0 || xv.shape().back() < kernel) {
    shape_fail("avg_pool1d", "input " + to_string(xv.shape()) + " kernel " + std::to_string(kernel) + " stride " +
                                 std::to_string(stride));
  }
  const std::size_t len = xv.shape().back();
  const std::size_t outer = len ? xv.size() / len : 0;
  const std::size_t out_len = (len - kernel) / stride + 1;
  Shape out_shape = xv.shape();
  out_shape.back() = out_len;
  Tensor<T> out(out_shape);
  const T inv = T{1} / static_cast<T>(kernel);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t p = 0; p < out_len; ++p) {
      T acc{0};
      for (std::size_t j = 0; j < kernel; ++j) acc += xv[o * len + p * stride + j];
      out[o * out_len + p] = acc * inv;
    }
  return tape.record("avg_pool1d", std::move(out), {x}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    auto& gx = t.grad_buffer(x.id);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t p = 0; p < out_len; ++p)
        for (std::size_t j = 0; j < kernel; ++j) gx[o * len + p * stride + j] += g[o * out_len + p] * inv;
  });
}

template <typename T>
Var dropout(Tape<T>& tape, Var x, double rate, std::uint64_t seed, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ArgumentError("dropout: rate must be in [0,1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return x;
  const auto& xv = tape.value(x);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> factor(xv.size());
  std::uint64_t state = seed;
  for (auto& f : factor) f = unit_uniform(state) < rate ? T{0} : keep_scale;
  Tensor<T> out = xv;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor[i];
  return tape.record("dropout", std::move(out), {x}, [x, factor = std::move(factor)](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    auto& gx = t.grad_buffer(x.id);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * factor[i];
  });
}

template <typename T>
Var gather_rows(Tape<T>& tape, Var x, std::span<const std::size_t> rows) {
  const auto& xv = tape.value(x);
  if (xv.rank() == 0) shape_fail("gather_rows", "scalar input");
  const std::size_t n = xv.dim(0);
  const std::size_t width = xv.row_size();
  Shape out_shape = xv.shape();
  out_shape[0] = rows.size();
  Tensor<T> out(out_shape);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= n) shape_fail("gather_rows", "row " + std::to_string(rows[k]) + " of " + to_string(xv.shape()));
    std::copy_n(xv.data() + rows[k] * width, width, out.data() + k * width);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return tape.record("gather_rows", std::move(out), {x}, [x, idx = std::move(idx), width](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    auto& gx = t.grad_buffer(x.id);
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (std::size_t c = 0; c < width; ++c) gx[idx[k] * width + c] += g[k * width + c];
  });
}

template <typename T>
Var scatter_add_rows(Tape<T>& tape, Var x, std::span<const std::size_t> rows, std::size_t out_rows) {
  const auto& xv = tape.value(x);
  if (xv.rank() == 0 || xv.dim(0) != rows.size()) {
    shape_fail("scatter_add_rows", to_string(xv.shape()) + " with " + std::to_string(rows.size()) + " indices");
  }
  const std::size_t width = xv.row_size();
  Shape out_shape = xv.shape();
  out_shape[0] = out_rows;
  Tensor<T> out(out_shape);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= out_rows) shape_fail("scatter_add_rows", "row " + std::to_string(rows[k]) + " >= " + std::to_string(out_rows));
    for (std::size_t c = 0; c < width; ++c) out[rows[k] * width + c] += xv[k * width + c];
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return tape.record("scatter_add_rows", std::move(out), {x}, [x, idx = std::move(idx), width](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    auto& gx = t.grad_buffer(x.id);
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (std::size_t c = 0; c < width; ++c) gx[k * width + c] += g[idx[k] * width + c];
  });
}

template <typename T>
Var masked_softmax(Tape<T>& tape, Var logits, std::span<const std::uint8_t> mask, std::size_t axis) {
  const auto& zv = tape.value(logits);
  if (axis >= zv.rank() || mask.size() != zv.size()) {
    shape_fail("masked_softmax", "logits " + to_string(zv.shape()) + " mask size " + std::to_string(mask.size()) +
                                     " axis " + std::to_string(axis));
  }
  const AxisSplit s = split_axis(zv.shape(), axis);
  Tensor<T> out(zv.shape());
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      auto at = [&](std::size_t l) { return (o * s.len + l) * s.inner + i; };
      T peak = -std::numeric_limits<T>::infinity();
      for (std::size_t l = 0; l < s.len; ++l)
        if (mask[at(l)]) peak = std::max(peak, zv[at(l)]);
      if (peak == -std::numeric_limits<T>::infinity()) continue;
      T total{0};
      for (std::size_t l = 0; l < s.len; ++l)
        if (mask[at(l)]) total += (out[at(l)] = std::exp(zv[at(l)] - peak));
      for (std::size_t l = 0; l < s.len; ++l) out[at(l)] /= total;
    }
  return tape.record("masked_softmax", std::move(out), {logits}, [logits, s](Tape<T>& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    const auto& y = t.value(Var{self});
    auto& gz = t.grad_buffer(logits.id);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t i = 0; i < s.inner; ++i) {
        T dot{0};
        for (std::size_t l = 0; l < s.len; ++l) {
          const std::size_t k = (o * s.len + l) * s.inner + i;
          dot += y[k] * g[k];
        }
        for (std::size_t l = 0; l < s.len; ++l) {
          const std::size_t k = (o * s.len + l) * s.inner + i;
          gz[k] += y[k] * (g[k] - dot);
        }
      }
  });
}

namespace {

template <typename T>
void check_classification(const char* op, const Tensor<T>& z, std::span<const int> labels, std::size_t weights) {
  if (z.rank() != 2 || labels.size() != z.dim(0) || weights != z.dim(0)) {
    shape_fail(op, "logits " + to_string(z.shape()) + " labels " + std::to_string(labels.size()) + " weights " +
                       std::to_string(weights));
  }
}

// log-softmax of one row into `out`.
template <typename T>
void log_softmax_row(const T* z, std::size_t c, T* out) {
  T peak = *std::max_element(z, z + c);
  T total{0};
  for (std::size_t k = 0; k < c; ++k) total += std::exp(z[k] - peak);
  const T log_total = std::log(total) + peak;
  for (std::size_t k = 0; k < c; ++k) out[k] = z[k] - log_total;
}

template <typename T>
Var classification_loss(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const T> weights, T gamma,
                        const char* name) {
  const auto& zv = tape.value(logits);
  check_classification(name, zv, labels, weights.size());
  const std::size_t rows = zv.dim(0), classes = zv.dim(1);
  std::vector<T> logp(rows * classes);
  T loss{0};
  for (std::size_t r = 0; r < rows; ++r) {
    if (weights[r] == T{0}) continue;
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= classes) {
      throw ArgumentError(std::string(name) + ": label " + std::to_string(labels[r]) + " out of range for " +
                          std::to_string(classes) + " classes");
    }
    T* lp = logp.data() + r * classes;
    log_softmax_row(zv.data() + r * classes, classes, lp);
    const T log_pt = lp[labels[r]];
    const T pt = std::exp(log_pt);
    const T modulator = gamma == T{0} ? T{1} : std::pow(std::max(T{0}, T{1} - pt), gamma);
    loss += weights[r] * -modulator * log_pt;
  }
  std::vector<int> lab(labels.begin(), labels.end());
  std::vector<T> w(weights.begin(), weights.end());
  return tape.record(name, Tensor<T>::scalar(loss), {logits},
                     [logits, rows, classes, gamma, lab = std::move(lab), w = std::move(w), logp = std::move(logp)](
                         Tape<T>& t, std::size_t self) {
                       const T g = t.grad_of(self)[0];
                       auto& gz = t.grad_buffer(logits.id);
                       for (std::size_t r = 0; r < rows; ++r) {
                         if (w[r] == T{0}) continue;
                         const T* lp = logp.data() + r * classes;
                         const T log_pt = lp[lab[r]];
                         const T pt = std::exp(log_pt);
                         const T q = std::max(T{0}, T{1} - pt);
                         // dL/dp_t for L = -(1-p_t)^gamma log p_t.
                         T dl_dpt;
                         if (gamma == T{0}) {
                           dl_dpt = -T{1} / pt;
                         } else {
                           const T focal_term = q > T{0} ? gamma * std::pow(q, gamma - T{1}) * log_pt : T{0};
                           dl_dpt = focal_term - std::pow(q, gamma) / pt;
                         }
                         // dp_t/dz_c = p_t (delta_c - p_c)
                         const T coef = g * w[r] * dl_dpt * pt;
                         for (std::size_t c = 0; c < classes; ++c) {
                           const T pc = std::exp(lp[c]);
                           const T delta = static_cast<int>(c) == lab[r] ? T{1} : T{0};
                           gz[r * classes + c] += coef * (delta - pc);
                         }
                       }
                     });
}

}  // namespace

template <typename T>
Var cross_entropy(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const T> weights) {
  return classification_loss(tape, logits, labels, weights, T{0}, "cross_entropy");
}

template <typename T>
Var focal_loss(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const T> weights, T gamma) {
  if (gamma < T{0}) throw ArgumentError("focal_loss: gamma must be >= 0");
  return classification_loss(tape, logits, labels, weights, gamma, "focal_loss");
}

#define HMER_INSTANTIATE_OPS(T)                                                                              \
  template Var matmul<T>(Tape<T>&, Var, Var);                                                                \
  template Var add<T>(Tape<T>&, Var, Var);                                                                   \
  template Var mul<T>(Tape<T>&, Var, Var);                                                                   \
  template Var scale<T>(Tape<T>&, Var, T);                                                                   \
  template Var concat<T>(Tape<T>&, std::span<const Var>, std::size_t);                                       \
  template Var sum<T>(Tape<T>&, Var, std::size_t);                                                           \
  template Var mean<T>(Tape<T>&, Var, std::size_t);                                                          \
  template Var sum_all<T>(Tape<T>&, Var);                                                                    \
  template Var relu<T>(Tape<T>&, Var);                                                                       \
  template Var leaky_relu<T>(Tape<T>&, Var, T);                                                              \
  template Var reshape<T>(Tape<T>&, Var, Shape);                                                             \
  template Var conv1d<T>(Tape<T>&, Var, Var, Var, Conv1dOptions);                                            \
  template Var avg_pool1d<T>(Tape<T>&, Var, std::size_t, std::size_t);                                       \
  template Var dropout<T>(Tape<T>&, Var, double, std::uint64_t, bool);                                       \
  template Var gather_rows<T>(Tape<T>&, Var, std::span<const std::size_t>);                                  \
  template Var scatter_add_rows<T>(Tape<T>&, Var, std::span<const std::size_t>, std::size_t);                \
  template Var masked_softmax<T>(Tape<T>&, Var, std::span<const std::uint8_t>, std::size_t);                 \
  template Var cross_entropy<T>(Tape<T>&, Var, std::span<const int>, std::span<const T>);                    \
  template Var focal_loss<T>(Tape<T>&, Var, std::span<const int>, std::span<const T>, T);

HMER_INSTANTIATE_OPS(float)
HMER_INSTANTIATE_OPS(double)

}  // namespace hmer::tensor
