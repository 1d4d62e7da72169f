// tests/tensor_test.cc

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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rawspoof/errors.h"
#include "rawspoof/grad_check.h"
#include "rawspoof/random.h"
#include "rawspoof/tensor.h"

namespace rawspoof {
namespace {

Tensor Leaf(Shape shape, std::vector<double> values) {
  Tensor t(std::move(shape), std::move(values));
  t.set_requires_grad(true);
  return t;
}

Tensor RandomTensor(Shape shape, Rng &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor t(std::move(shape));
  for (double &v : t.mutable_data()) v = n(rng);
  return t;
}

TEST(Tensor, HandleSemanticsAndClone) {
  Tensor a({2, 3}, 1.5);
  Tensor b = a;
  b.mutable_data()[0] = 7.0;
  EXPECT_EQ(a.data()[0], 7.0);
  EXPECT_TRUE(a.SharesStorage(b));
  Tensor c = a.Clone();
  c.mutable_data()[0] = -1.0;
  EXPECT_EQ(a.data()[0], 7.0);
  EXPECT_FALSE(c.requires_grad());
  EXPECT_EQ(ShapeString(a.shape()), ShapeString(c.shape()));
}

TEST(Tensor, ConstructionChecksValueCount) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Tensor, ReluForwardAndBackward) {
  Tape tape;
  Tensor x = Leaf({3}, {-1.0, 0.0, 2.0});
  Tensor y = Relu(x);
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()),
            (std::vector<double>{0.0, 0.0, 2.0}));
  tape.Backward(Sum(y));
  EXPECT_EQ(std::vector<double>(x.grad().begin(), x.grad().end()),
            (std::vector<double>{0.0, 0.0, 1.0}));
}

TEST(Tensor, SquareDerivative) {
  Tape tape;
  Tensor x = Leaf({1}, {3.0});
  tape.Backward(Sum(Mul(x, x)));
  EXPECT_DOUBLE_EQ(x.grad()[0], 6.0);
}

TEST(Tensor, SumOfOnes) {
  Tape tape;
  Tensor w = Leaf({5}, {1, 1, 1, 1, 1});
  tape.Backward(Sum(w));
  for (double g : w.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Tensor, UnreachableLeafHasZeroGradient) {
  Tape tape;
  Tensor w = Leaf({4}, {1, 2, 3, 4});
  Tensor x = Leaf({2}, {1, 2});
  tape.Backward(Sum(x));
  for (double g : w.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Tensor, NoRecordingWithoutTape) {
  Tensor x = Leaf({2}, {1, 2});
  Tensor y = Mul(x, x);
  EXPECT_FALSE(y.requires_grad());
  EXPECT_EQ(Tape::Active(), nullptr);
}

TEST(Tensor, TapeCannotBeReused) {
  Tape tape;
  Tensor x = Leaf({1}, {2.0});
  Tensor loss = Sum(x);
  tape.Backward(loss);
  EXPECT_THROW(tape.Backward(loss), Error);
}

TEST(Tensor, BackwardNeedsScalar) {
  Tape tape;
  Tensor x = Leaf({2}, {2.0, 3.0});
  EXPECT_THROW(tape.Backward(Scale(x, 2.0)), Error);
}

TEST(Tensor, SharedSubexpressionAccumulates) {
  // y = x * x + x, dy/dx = 2x + 1 summed over uses.
  Tape tape;
  Tensor x = Leaf({1}, {4.0});
  tape.Backward(Sum(Add(Mul(x, x), x)));
  EXPECT_DOUBLE_EQ(x.grad()[0], 9.0);
}

TEST(Tensor, BinaryOpsRejectMismatchedShapes) {
  Tensor a({2}), b({3});
  EXPECT_THROW(Add(a, b), ShapeError);
  EXPECT_THROW(Mul(a, b), ShapeError);
  EXPECT_THROW(MatMul(Tensor({2, 3}), Tensor({2, 3})), ShapeError);
  EXPECT_THROW(Reshape(Tensor({2, 3}), {4}), ShapeError);
}

TEST(Tensor, MatMulValues) {
  Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor b({3, 2}, {7, 8, 9, 10, 11, 12});
  Tensor c = MatMul(a, b);
  EXPECT_EQ(c.shape(), (Shape{2, 2}));
  EXPECT_EQ(std::vector<double>(c.data().begin(), c.data().end()),
            (std::vector<double>{58, 64, 139, 154}));
}

TEST(Tensor, ConcatAndSliceRoundTrip) {
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor b({2, 1}, {5, 6});
  std::vector<Tensor> parts{a, b};
  Tensor c = Concat(parts, 1);
  EXPECT_EQ(c.shape(), (Shape{2, 3}));
  EXPECT_EQ(std::vector<double>(c.data().begin(), c.data().end()),
            (std::vector<double>{1, 2, 5, 3, 4, 6}));
  Tensor s = Slice(c, 1, 2, 3);
  EXPECT_EQ(std::vector<double>(s.data().begin(), s.data().end()),
            (std::vector<double>{5, 6}));
}

TEST(Tensor, TwoLayerChainMatchesFiniteDifferences) {
  Rng rng(11);
  Tensor w = RandomTensor({4, 3}, rng);
  Tensor x = RandomTensor({3, 2}, rng);
  auto f = [](const std::vector<Tensor> &in) { return Sum(Relu(MatMul(in[0], in[1]))); };
  const auto r = GradCheck(f, {w, x});
  EXPECT_LT(r.max_relative_error, 1e-5);
  EXPECT_EQ(r.coordinates_checked, 18u);
}

TEST(GradCheck, SquareSum) {
  Rng rng(3);
  auto f = [](const std::vector<Tensor> &in) { return Sum(Mul(in[0], in[0])); };
  EXPECT_LT(GradCheck(f, {RandomTensor({10}, rng)}).max_relative_error, 1e-7);
}

TEST(GradCheck, ReluAwayFromKink) {
  Rng rng(4);
  Tensor x = RandomTensor({10}, rng);
  for (double &v : x.mutable_data()) v = (v < 0 ? -0.2 : 0.2) + v;
  auto f = [](const std::vector<Tensor> &in) { return Sum(Relu(in[0])); };
  EXPECT_LT(GradCheck(f, {x}).max_relative_error, 1e-7);
}

TEST(GradCheck, ConstantFunction) {
  auto f = [](const std::vector<Tensor> &) { return Tensor::Scalar(2.5); };
  EXPECT_EQ(GradCheck(f, {Tensor({3}, 1.0)}).max_relative_error, 0.0);
}

TEST(GradCheck, NonFiniteOutputIsNumericError) {
  auto f = [](const std::vector<Tensor> &in) { return Sum(Log(in[0])); };
  EXPECT_THROW(GradCheck(f, {Tensor({2}, {1.0, 0.0})}), NumericError);
}

// Every elementwise and structural operation against central differences.
class ElementwiseGrad : public ::testing::TestWithParam<int> {};

TEST_P(ElementwiseGrad, MatchesFiniteDifferences) {
  Rng rng(100 + GetParam());
  Tensor a = RandomTensor({3, 4}, rng);
  Tensor b = RandomTensor({3, 4}, rng);
  Tensor pos = RandomTensor({3, 4}, rng);
  for (double &v : pos.mutable_data()) v = 0.5 + std::abs(v);
  Tensor weights = RandomTensor({3, 4}, rng);
  ScalarFunction f;
  std::vector<Tensor> inputs{a, b};
  auto weigh = [weights](const Tensor &t) { return Sum(Mul(t, weights)); };
  switch (GetParam()) {
    case 0: f = [=](const auto &in) { return weigh(Add(in[0], in[1])); }; break;
    case 1: f = [=](const auto &in) { return weigh(Sub(in[0], in[1])); }; break;
    case 2: f = [=](const auto &in) { return weigh(Mul(in[0], in[1])); }; break;
    case 3: f = [=](const auto &in) { return weigh(Scale(in[0], -1.7)); }; break;
    case 4: f = [=](const auto &in) { return weigh(Sigmoid(in[0])); }; break;
    case 5: f = [=](const auto &in) { return weigh(Tanh(in[0])); }; break;
    case 6:
      inputs = {pos};
      f = [=](const auto &in) { return weigh(Log(in[0])); };
      break;
    case 7: f = [=](const auto &in) { return weigh(Exp(in[0])); }; break;
    case 8:
      f = [=](const auto &in) {
        Tensor prod = MatMul(Reshape(in[0], {4, 3}), Reshape(in[1], {3, 4}));
        return weigh(Reshape(Slice(prod, 0, 0, 3), {3, 4}));
      };
      break;
    case 9:
      f = [=](const auto &in) {
        std::vector<Tensor> parts{in[0], in[1]};
        return Sum(Mul(Slice(Concat(parts, 0), 0, 1, 4), Reshape(weights, {3, 4})));
      };
      break;
  }
  EXPECT_LT(GradCheck(f, inputs).max_relative_error, 1e-7) << "case " << GetParam();
}

INSTANTIATE_TEST_SUITE_P(AllOps, ElementwiseGrad, ::testing::Range(0, 10));

}  // namespace
}  // namespace rawspoof
