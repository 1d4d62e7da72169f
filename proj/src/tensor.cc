// src/tensor.cc

// Copyright 2026 The rawspoof Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "rawspoof/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rawspoof/errors.h"

namespace rawspoof {

std::size_t NumElements(const Shape &shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeString(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

void CheckShape(const Shape &shape) {
  if (shape.empty())
    throw ShapeError("tensor shape must have at least one dimension");
  for (std::size_t d : shape) {
    if (d == 0)
      throw ShapeError("tensor shape " + ShapeString(shape) +
                       " has a zero-sized dimension");
  }
}

void RequireSameShape(const char *op, const Tensor &a, const Tensor &b) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     ShapeString(a.shape()) + " vs " + ShapeString(b.shape()));
}

thread_local Tape *active_tape = nullptr;

// Applies `f` elementwise and records `df(x, y)` as the local derivative,
// where y is the forward output.
template <typename F, typename DF>
Tensor UnaryOp(const Tensor &x, F f, DF df) {
  Tensor out(x.shape());
  auto in = x.data();
  auto o = out.mutable_data();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = f(in[i]);
  if (Tape::ShouldRecord({&x})) {
    Tape::Record(out, [x, out, df](std::span<const double> g) mutable {
      auto gx = x.mutable_grad();
      auto xv = x.data();
      auto yv = out.data();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(xv[i], yv[i]);
    });
  }
  return out;
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) {
  CheckShape(shape);
  impl_ = std::make_shared<Storage>();
  impl_->data.assign(NumElements(shape), fill);
  impl_->shape = std::move(shape);
}

Tensor::Tensor(Shape shape, std::vector<double> values) {
  CheckShape(shape);
  if (values.size() != NumElements(shape))
    throw ShapeError("tensor shape " + ShapeString(shape) + " needs " +
                     std::to_string(NumElements(shape)) + " values, got " +
                     std::to_string(values.size()));
  impl_ = std::make_shared<Storage>();
  impl_->shape = std::move(shape);
  impl_->data = std::move(values);
}

Tensor Tensor::Scalar(double value) { return Tensor({1}, value); }

const Shape &Tensor::shape() const {
  if (!impl_) throw ShapeError("use of an undefined tensor");
  return impl_->shape;
}

std::size_t Tensor::dim(std::size_t axis) const {
  const Shape &s = shape();
  if (axis >= s.size())
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " +
                     ShapeString(s));
  return s[axis];
}

std::size_t Tensor::size() const { return impl_ ? impl_->data.size() : 0; }

std::span<const double> Tensor::data() const {
  if (!impl_) return {};
  return impl_->data;
}

std::span<double> Tensor::mutable_data() {
  if (!impl_) return {};
  return impl_->data;
}

double Tensor::item() const {
  if (size() != 1)
    throw ShapeError("item() on a tensor of shape " + ShapeString(shape()));
  return impl_->data[0];
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

Tensor &Tensor::set_requires_grad(bool value) {
  shape();
  impl_->requires_grad = value;
  if (value && impl_->grad.size() != impl_->data.size())
    impl_->grad.assign(impl_->data.size(), 0.0);
  return *this;
}

bool Tensor::has_grad() const { return impl_ && !impl_->grad.empty(); }

std::span<const double> Tensor::grad() const {
  if (!impl_) return {};
  return impl_->grad;
}

std::span<double> Tensor::mutable_grad() const {
  shape();
  if (impl_->grad.size() != impl_->data.size())
    impl_->grad.assign(impl_->data.size(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() const {
  if (impl_ && !impl_->grad.empty())
    std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tensor Tensor::Clone() const {
  return Tensor(shape(), std::vector<double>(data().begin(), data().end()));
}

Tape::Tape() : previous_(active_tape) { active_tape = this; }

Tape::~Tape() { active_tape = previous_; }

Tape *Tape::Active() { return active_tape; }

bool Tape::ShouldRecord(std::initializer_list<const Tensor *> inputs) {
  if (active_tape == nullptr) return false;
  for (const Tensor *t : inputs)
    if (t->requires_grad()) return true;
  return false;
}

bool Tape::ShouldRecord(std::span<const Tensor> inputs) {
  if (active_tape == nullptr) return false;
  for (const Tensor &t : inputs)
    if (t.requires_grad()) return true;
  return false;
}

void Tape::Record(Tensor &output, BackwardFn backward) {
  if (active_tape == nullptr) return;
  output.set_requires_grad(true);
  active_tape->entries_.push_back({output, std::move(backward)});
}

void Tape::Backward(const Tensor &loss) {
  if (consumed_)
    throw Error("backward called twice on the same tape; reset gradients "
                "and record a new tape");
  if (loss.size() != 1)
    throw ShapeError("backward needs a scalar loss, got shape " +
                     ShapeString(loss.shape()));
  consumed_ = true;
  if (!loss.requires_grad()) return;
  Tensor seed = loss;
  seed.mutable_grad()[0] += 1.0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (!it->output.has_grad()) continue;
    it->backward(it->output.grad());
  }
}

Tensor Add(const Tensor &a, const Tensor &b) {
  RequireSameShape("add", a, b);
  Tensor out(a.shape());
  auto o = out.mutable_data();
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + bv[i];
  if (Tape::ShouldRecord({&a, &b})) {
    Tape::Record(out, [a, b](std::span<const double> g) mutable {
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (b.requires_grad()) {
        auto gb = b.mutable_grad();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
      }
    });
  }
  return out;
}

Tensor Sub(const Tensor &a, const Tensor &b) {
  RequireSameShape("sub", a, b);
  Tensor out(a.shape());
  auto o = out.mutable_data();
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] - bv[i];
  if (Tape::ShouldRecord({&a, &b})) {
    Tape::Record(out, [a, b](std::span<const double> g) mutable {
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (b.requires_grad()) {
        auto gb = b.mutable_grad();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
      }
    });
  }
  return out;
}

Tensor Mul(const Tensor &a, const Tensor &b) {
  RequireSameShape("mul", a, b);
  Tensor out(a.shape());
  auto o = out.mutable_data();
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * bv[i];
  if (Tape::ShouldRecord({&a, &b})) {
    Tape::Record(out, [a, b](std::span<const double> g) mutable {
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        auto bv = b.data();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
      }
      if (b.requires_grad()) {
        auto gb = b.mutable_grad();
        auto av = a.data();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
      }
    });
  }
  return out;
}

Tensor Scale(const Tensor &x, double factor) {
  return UnaryOp(
      x, [factor](double v) { return v * factor; },
      [factor](double, double) { return factor; });
}

Tensor Relu(const Tensor &x) {
  // Subgradient at exactly zero is zero.
  return UnaryOp(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor Sigmoid(const Tensor &x) {
  return UnaryOp(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Tanh(const Tensor &x) {
  return UnaryOp(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Log(const Tensor &x) {
  return UnaryOp(
      x, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

Tensor Exp(const Tensor &x) {
  return UnaryOp(
      x, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Tensor MatMul(const Tensor &a, const Tensor &b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    throw ShapeError("matmul: incompatible shapes " + ShapeString(a.shape()) +
                     " and " + ShapeString(b.shape()));
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out({m, n});
  auto o = out.mutable_data();
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    double *orow = &o[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double *brow = &bv[p * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  if (Tape::ShouldRecord({&a, &b})) {
    Tape::Record(out, [a, b, m, k, n](std::span<const double> g) mutable {
      if (a.requires_grad()) {
        // dA = G * B^T
        auto ga = a.mutable_grad();
        auto bv = b.data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
            ga[i * k + p] += acc;
          }
      }
      if (b.requires_grad()) {
        // dB = A^T * G
        auto gb = b.mutable_grad();
        auto av = a.data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            if (aip == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
          }
      }
    });
  }
  return out;
}

Tensor Reshape(const Tensor &x, Shape shape) {
  CheckShape(shape);
  if (NumElements(shape) != x.size())
    throw ShapeError("reshape: cannot view " + ShapeString(x.shape()) + " as " +
                     ShapeString(shape));
  Tensor out(std::move(shape),
             std::vector<double>(x.data().begin(), x.data().end()));
  if (Tape::ShouldRecord({&x})) {
    Tape::Record(out, [x](std::span<const double> g) mutable {
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    });
  }
  return out;
}

namespace {

// Splits a shape around `axis` into (outer, axis, inner) extents.
struct AxisView {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisView ViewAround(const Shape &shape, std::size_t axis) {
  AxisView v;
  for (std::size_t i = 0; i < axis; ++i) v.outer *= shape[i];
  v.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) v.inner *= shape[i];
  return v;
}

}  // namespace

Tensor Concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape &first = parts[0].shape();
  if (axis >= first.size())
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " +
                     ShapeString(first));
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const Tensor &p : parts) {
    Shape s = p.shape();
    if (s.size() != first.size())
      throw ShapeError("concat: rank mismatch " + ShapeString(first) + " vs " +
                       ShapeString(s));
    for (std::size_t i = 0; i < s.size(); ++i)
      if (i != axis && s[i] != first[i])
        throw ShapeError("concat: shape mismatch " + ShapeString(first) +
                         " vs " + ShapeString(s));
    out_shape[axis] += s[axis];
  }
  Tensor out(out_shape);
  auto o = out.mutable_data();
  const AxisView ov = ViewAround(out_shape, axis);
  std::size_t offset = 0;
  std::vector<std::size_t> offsets;
  for (const Tensor &p : parts) {
    const AxisView pv = ViewAround(p.shape(), axis);
    auto pd = p.data();
    const std::size_t block = pv.extent * pv.inner;
    for (std::size_t r = 0; r < pv.outer; ++r)
      std::copy_n(&pd[r * block], block,
                  &o[r * ov.extent * ov.inner + offset * ov.inner]);
    offsets.push_back(offset);
    offset += pv.extent;
  }
  if (Tape::ShouldRecord(parts)) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    Tape::Record(out, [inputs, offsets, ov, axis](std::span<const double> g) mutable {
      for (std::size_t n = 0; n < inputs.size(); ++n) {
        Tensor &p = inputs[n];
        if (!p.requires_grad()) continue;
        const AxisView pv = ViewAround(p.shape(), axis);
        auto gp = p.mutable_grad();
        const std::size_t block = pv.extent * pv.inner;
        for (std::size_t r = 0; r < pv.outer; ++r) {
          const double *src = &g[r * ov.extent * ov.inner + offsets[n] * ov.inner];
          double *dst = &gp[r * block];
          for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
        }
      }
    });
  }
  return out;
}

Tensor Slice(const Tensor &x, std::size_t axis, std::size_t begin,
             std::size_t end) {
  const Shape &shape = x.shape();
  if (axis >= shape.size() || begin >= end || end > shape[axis])
    throw ShapeError("slice: range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") on axis " + std::to_string(axis) +
                     " invalid for " + ShapeString(shape));
  Shape out_shape = shape;
  out_shape[axis] = end - begin;
  const AxisView xv = ViewAround(shape, axis);
  const std::size_t block = (end - begin) * xv.inner;
  Tensor out(out_shape);
  auto o = out.mutable_data();
  auto xd = x.data();
  for (std::size_t r = 0; r < xv.outer; ++r)
    std::copy_n(&xd[r * xv.extent * xv.inner + begin * xv.inner], block,
                &o[r * block]);
  if (Tape::ShouldRecord({&x})) {
    Tape::Record(out, [x, xv, begin, block](std::span<const double> g) mutable {
      auto gx = x.mutable_grad();
      for (std::size_t r = 0; r < xv.outer; ++r) {
        double *dst = &gx[r * xv.extent * xv.inner + begin * xv.inner];
        const double *src = &g[r * block];
        for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
      }
    });
  }
  return out;
}

Tensor Sum(const Tensor &x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  Tensor out = Tensor::Scalar(acc);
  if (Tape::ShouldRecord({&x})) {
    Tape::Record(out, [x](std::span<const double> g) mutable {
      auto gx = x.mutable_grad();
      for (double &v : gx) v += g[0];
    });
  }
  return out;
}

}  // namespace rawspoof
