// Copyright 2026 The VANI Project Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VANI_MODEL_AUTODIFF_H_
#define VANI_MODEL_AUTODIFF_H_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vani/util/error.h"
#include "vani/util/mat.h"

namespace vani {

template <typename T>
struct ParamTensor {
  std::string name;
  Mat<T> value;
  Mat<T> grad;

  ParamTensor(std::string n, Mat<T> v)
      : name(std::move(n)), value(std::move(v)),
        grad(value.rows, value.cols) {}
};

// Eagerly evaluated reverse-mode tape over small dense matrices. Nodes are
// appended in topological order, so one reverse sweep backpropagates. The
// tape is rebuilt per training example; parameters live outside it and
// accumulate gradients across Backward calls.
template <typename T>
class Graph {
 public:
  using Ref = int32_t;

  Ref Input(Mat<T> v) { return Push(Op::kInput, std::move(v)); }

  Ref Scalar(T v) {
    Mat<T> m(1, 1);
    m.v[0] = v;
    return Input(std::move(m));
  }

  Ref Param(ParamTensor<T>* p) {
    Ref r = Push(Op::kParam, p->value);
    nodes_[r].param = p;
    return r;
  }

  // w: [m x n], x: [n x 1] -> [m x 1]
  Ref MatVec(Ref w, Ref x) {
    const Mat<T>& W = Val(w);
    const Mat<T>& X = Val(x);
    if (X.cols != 1 || W.cols != X.rows) throw Error("MatVec shape mismatch");
    Mat<T> out(W.rows, 1);
    for (int i = 0; i < W.rows; ++i) {
      T acc = T(0);
      const T* row = &W.v[static_cast<size_t>(i) * W.cols];
      for (int j = 0; j < W.cols; ++j) acc += row[j] * X.v[j];
      out.v[i] = acc;
    }
    Ref r = Push(Op::kMatVec, std::move(out));
    nodes_[r].a = w;
    nodes_[r].b = x;
    return r;
  }

  Ref Add(Ref a, Ref b) { return Binary(Op::kAdd, a, b); }
  Ref Sub(Ref a, Ref b) { return Binary(Op::kSub, a, b); }
  Ref Mul(Ref a, Ref b) { return Binary(Op::kMul, a, b); }

  Ref Scale(Ref a, T c) {
    Mat<T> out = Val(a);
    for (T& v : out.v) v *= c;
    Ref r = Push(Op::kScale, std::move(out));
    nodes_[r].a = a;
    nodes_[r].c0 = c;
    return r;
  }

  Ref AddConst(Ref a, T c) {
    Mat<T> out = Val(a);
    for (T& v : out.v) v += c;
    Ref r = Push(Op::kAddConst, std::move(out));
    nodes_[r].a = a;
    return r;
  }

  Ref Neg(Ref a) { return Scale(a, T(-1)); }

  Ref Sigmoid(Ref a) {
    Mat<T> out = Val(a);
    for (T& v : out.v) v = StableSigmoid(v);
    return Unary(Op::kSigmoid, a, std::move(out));
  }

  Ref Tanh(Ref a) {
    Mat<T> out = Val(a);
    for (T& v : out.v) v = std::tanh(v);
    return Unary(Op::kTanh, a, std::move(out));
  }

  Ref Exp(Ref a) {
    Mat<T> out = Val(a);
    for (T& v : out.v) v = std::exp(v);
    return Unary(Op::kExp, a, std::move(out));
  }

  Ref Softplus(Ref a) {
    Mat<T> out = Val(a);
    for (T& v : out.v)
      v = v > T(20) ? v : (v < T(-20) ? std::exp(v) : std::log1p(std::exp(v)));
    return Unary(Op::kSoftplus, a, std::move(out));
  }

  Ref Square(Ref a) {
    Mat<T> out = Val(a);
    for (T& v : out.v) v *= v;
    return Unary(Op::kSquare, a, std::move(out));
  }

  Ref Clamp(Ref a, T lo, T hi) {
    Mat<T> out = Val(a);
    for (T& v : out.v) v = std::min(hi, std::max(lo, v));
    Ref r = Push(Op::kClamp, std::move(out));
    nodes_[r].a = a;
    nodes_[r].c0 = lo;
    nodes_[r].c1 = hi;
    return r;
  }

  // Column vectors stacked top to bottom.
  Ref Concat(const std::vector<Ref>& parts) {
    int rows = 0;
    for (Ref p : parts) {
      if (Val(p).cols != 1) throw Error("Concat expects column vectors");
      rows += Val(p).rows;
    }
    Mat<T> out(rows, 1);
    int at = 0;
    for (Ref p : parts)
      for (T v : Val(p).v) out.v[at++] = v;
    Ref r = Push(Op::kConcat, std::move(out));
    nodes_[r].list = parts;
    return r;
  }

  Ref SliceRows(Ref a, int r0, int n) {
    const Mat<T>& A = Val(a);
    if (A.cols != 1 || r0 < 0 || r0 + n > A.rows)
      throw Error("SliceRows out of range");
    Mat<T> out(n, 1);
    for (int i = 0; i < n; ++i) out.v[i] = A.v[r0 + i];
    Ref r = Push(Op::kSliceRows, std::move(out));
    nodes_[r].a = a;
    nodes_[r].i0 = r0;
    return r;
  }

  // Column j of a matrix as a vector (embedding-table lookup).
  Ref Col(Ref a, int j) {
    const Mat<T>& A = Val(a);
    if (j < 0 || j >= A.cols) throw Error("Col out of range");
    Mat<T> out(A.rows, 1);
    for (int i = 0; i < A.rows; ++i) out.v[i] = A(i, j);
    Ref r = Push(Op::kCol, std::move(out));
    nodes_[r].a = a;
    nodes_[r].i0 = j;
    return r;
  }

  Ref Sum(Ref a) {
    T acc = T(0);
    for (T v : Val(a).v) acc += v;
    Mat<T> out(1, 1);
    out.v[0] = acc;
    return Unary(Op::kSum, a, std::move(out));
  }

  Ref Mean(Ref a) {
    Ref s = Sum(a);
    return Scale(s, T(1) / static_cast<T>(Val(a).size()));
  }

  const Mat<T>& Val(Ref r) const { return nodes_[r].val; }

  T ScalarValue(Ref r) const {
    if (Val(r).size() != 1) throw Error("not a scalar node");
    return Val(r).v[0];
  }

  // Reverse sweep from `loss` (1x1). Parameter gradients are accumulated
  // into their ParamTensor::grad.
  void Backward(Ref loss) {
    if (Val(loss).size() != 1) throw Error("loss must be scalar");
    for (auto& n : nodes_) {
      n.grad.rows = n.val.rows;
      n.grad.cols = n.val.cols;
      n.grad.v.assign(n.val.size(), T(0));
    }
    nodes_[loss].grad.v[0] = T(1);
    for (Ref r = loss; r >= 0; --r) BackOne(r);
  }

  size_t size() const { return nodes_.size(); }

 private:
  enum class Op : uint8_t {
    kInput, kParam, kMatVec, kAdd, kSub, kMul, kScale, kAddConst, kSigmoid,
    kTanh, kExp, kSoftplus, kSquare, kClamp, kConcat, kSliceRows, kCol, kSum,
  };

  struct Node {
    Op op;
    Ref a = -1, b = -1;
    int i0 = 0;
    T c0 = T(0), c1 = T(0);
    std::vector<Ref> list;
    ParamTensor<T>* param = nullptr;
    Mat<T> val;
    Mat<T> grad;
  };

  static T StableSigmoid(T x) {
    if (x >= T(0)) {
      T e = std::exp(-x);
      return T(1) / (T(1) + e);
    }
    T e = std::exp(x);
    return e / (T(1) + e);
  }

  Ref Push(Op op, Mat<T> val) {
    Node n;
    n.op = op;
    n.val = std::move(val);
    nodes_.push_back(std::move(n));
    return static_cast<Ref>(nodes_.size() - 1);
  }

  Ref Unary(Op op, Ref a, Mat<T> out) {
    Ref r = Push(op, std::move(out));
    nodes_[r].a = a;
    return r;
  }

  Ref Binary(Op op, Ref a, Ref b) {
    const Mat<T>& A = Val(a);
    const Mat<T>& B = Val(b);
    if (!A.SameShape(B)) throw Error("elementwise shape mismatch");
    Mat<T> out(A.rows, A.cols);
    switch (op) {
      case Op::kAdd:
        for (size_t i = 0; i < A.size(); ++i) out.v[i] = A.v[i] + B.v[i];
        break;
      case Op::kSub:
        for (size_t i = 0; i < A.size(); ++i) out.v[i] = A.v[i] - B.v[i];
        break;
      case Op::kMul:
        for (size_t i = 0; i < A.size(); ++i) out.v[i] = A.v[i] * B.v[i];
        break;
      default:
        throw Error("not a binary op");
    }
    Ref r = Push(op, std::move(out));
    nodes_[r].a = a;
    nodes_[r].b = b;
    return r;
  }

  void BackOne(Ref r) {
    Node& n = nodes_[r];
    const Mat<T>& g = n.grad;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParam:
        for (size_t i = 0; i < g.size(); ++i) n.param->grad.v[i] += g.v[i];
        break;
      case Op::kMatVec: {
        Node& w = nodes_[n.a];
        Node& x = nodes_[n.b];
        // dW = g x^T, dx = W^T g
        for (int i = 0; i < w.val.rows; ++i) {
          T gi = g.v[i];
          if (gi == T(0)) continue;
          T* wg = &w.grad.v[static_cast<size_t>(i) * w.val.cols];
          const T* wv = &w.val.v[static_cast<size_t>(i) * w.val.cols];
          for (int j = 0; j < w.val.cols; ++j) {
            wg[j] += gi * x.val.v[j];
            x.grad.v[j] += wv[j] * gi;
          }
        }
        break;
      }
      case Op::kAdd:
        for (size_t i = 0; i < g.size(); ++i) {
          nodes_[n.a].grad.v[i] += g.v[i];
          nodes_[n.b].grad.v[i] += g.v[i];
        }
        break;
      case Op::kSub:
        for (size_t i = 0; i < g.size(); ++i) {
          nodes_[n.a].grad.v[i] += g.v[i];
          nodes_[n.b].grad.v[i] -= g.v[i];
        }
        break;
      case Op::kMul:
        for (size_t i = 0; i < g.size(); ++i) {
          nodes_[n.a].grad.v[i] += g.v[i] * nodes_[n.b].val.v[i];
          nodes_[n.b].grad.v[i] += g.v[i] * nodes_[n.a].val.v[i];
        }
        break;
      case Op::kScale:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad.v[i] += g.v[i] * n.c0;
        break;
      case Op::kAddConst:
        for (size_t i = 0; i < g.size(); ++i) nodes_[n.a].grad.v[i] += g.v[i];
        break;
      case Op::kSigmoid:
        for (size_t i = 0; i < g.size(); ++i) {
          T y = n.val.v[i];
          nodes_[n.a].grad.v[i] += g.v[i] * y * (T(1) - y);
        }
        break;
      case Op::kTanh:
        for (size_t i = 0; i < g.size(); ++i) {
          T y = n.val.v[i];
          nodes_[n.a].grad.v[i] += g.v[i] * (T(1) - y * y);
        }
        break;
      case Op::kExp:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad.v[i] += g.v[i] * n.val.v[i];
        break;
      case Op::kSoftplus:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad.v[i] += g.v[i] * StableSigmoid(nodes_[n.a].val.v[i]);
        break;
      case Op::kSquare:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad.v[i] += g.v[i] * T(2) * nodes_[n.a].val.v[i];
        break;
      case Op::kClamp:
        for (size_t i = 0; i < g.size(); ++i) {
          T x = nodes_[n.a].val.v[i];
          if (x >= n.c0 && x <= n.c1) nodes_[n.a].grad.v[i] += g.v[i];
        }
        break;
      case Op::kConcat: {
        int at = 0;
        for (Ref p : n.list) {
          Node& src = nodes_[p];
          for (size_t i = 0; i < src.val.size(); ++i)
            src.grad.v[i] += g.v[at++];
        }
        break;
      }
      case Op::kSliceRows:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad.v[n.i0 + i] += g.v[i];
        break;
      case Op::kCol: {
        Node& src = nodes_[n.a];
        for (int i = 0; i < n.val.rows; ++i)
          src.grad.v[static_cast<size_t>(i) * src.val.cols + n.i0] += g.v[i];
        break;
      }
      case Op::kSum:
        for (size_t i = 0; i < nodes_[n.a].val.size(); ++i)
          nodes_[n.a].grad.v[i] += g.v[0];
        break;
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace vani

#endif  // VANI_MODEL_AUTODIFF_H_
