// rawspoof/tensor.h

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

#ifndef RAWSPOOF_TENSOR_H_
#define RAWSPOOF_TENSOR_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rawspoof {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape &shape);
std::string ShapeString(const Shape &shape);

/**
   Tensor is a reference-counted handle onto a dense row-major array of
   doubles.  Copying a Tensor copies the handle, not the values; use Clone()
   for a deep copy.  A tensor that requires_grad carries a gradient buffer of
   the same length as its data, which backward passes accumulate into.
 */
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Scalar(double value);

  bool defined() const { return impl_ != nullptr; }
  const Shape &shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<const double> data() const;
  std::span<double> mutable_data();
  double item() const;

  bool requires_grad() const;
  /// Turning this on allocates a zeroed gradient buffer.
  Tensor &set_requires_grad(bool value);

  bool has_grad() const;
  std::span<const double> grad() const;
  /// Gradient buffer, allocated (zeroed) on first use.
  std::span<double> mutable_grad() const;
  void zero_grad() const;

  /// Deep copy of shape and values; the copy is a leaf without gradient.
  Tensor Clone() const;
  bool SharesStorage(const Tensor &other) const { return impl_ == other.impl_; }

 private:
  struct Storage {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;
  };
  std::shared_ptr<Storage> impl_;
};

/// Receives the gradient of the recorded output and accumulates (+=) into
/// the gradients of the operation's inputs.
using BackwardFn = std::function<void(std::span<const double> output_grad)>;

/**
   Tape records differentiable operations in execution order.  Constructing a
   Tape makes it the active tape of the calling thread until it is destroyed;
   operations evaluated while no tape is active (or whose inputs do not
   require gradients) are not recorded, which is how inference runs.

   Backward() walks the recorded entries in reverse, so every node is visited
   exactly once and only after all of its consumers.
 */
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  static Tape *Active();

  /// True if an active tape exists and any of `inputs` requires a gradient.
  static bool ShouldRecord(std::initializer_list<const Tensor *> inputs);
  static bool ShouldRecord(std::span<const Tensor> inputs);

  /// Appends `output` to the active tape and marks it as requiring grad.
  static void Record(Tensor &output, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and propagates to every reachable tensor.
  /// Throws if `loss` is not a single element or the tape was already used.
  void Backward(const Tensor &loss);

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    Tensor output;
    BackwardFn backward;
  };
  std::vector<Entry> entries_;
  Tape *previous_ = nullptr;
  bool consumed_ = false;
};

// Elementwise and structural operations.  All shapes must match exactly
// for binary elementwise operations; there is no broadcasting.
Tensor Add(const Tensor &a, const Tensor &b);
Tensor Sub(const Tensor &a, const Tensor &b);
Tensor Mul(const Tensor &a, const Tensor &b);
Tensor Scale(const Tensor &x, double factor);
Tensor Relu(const Tensor &x);
Tensor Sigmoid(const Tensor &x);
Tensor Tanh(const Tensor &x);
Tensor Log(const Tensor &x);
Tensor Exp(const Tensor &x);

/// (m x k) * (k x n) -> (m x n).
Tensor MatMul(const Tensor &a, const Tensor &b);

Tensor Reshape(const Tensor &x, Shape shape);
Tensor Concat(std::span<const Tensor> parts, std::size_t axis);
/// Elements [begin, end) along `axis`.
Tensor Slice(const Tensor &x, std::size_t axis, std::size_t begin,
             std::size_t end);
/// Sum of all elements, as a one-element tensor.
Tensor Sum(const Tensor &x);

}  // namespace rawspoof

#endif  // RAWSPOOF_TENSOR_H_
