#ifndef COSMOS_AUTOGRAD_H_
#define COSMOS_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cosmos/tensor.h"

// Tape-free reverse-mode differentiation over Tensor values. Each op builds a
// node holding its value, its parents and a closure that pushes the node's
// gradient into the parents. Graphs are per forward pass; parameters are
// long-lived leaf nodes.

namespace cosmos::ag {

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<Var> parents;
  std::function<void(Node&)> backward;

  // Gradient buffer, allocated on first use.
  Tensor& Grad();
  const Var& parent(size_t i) const { return parents[i]; }
};

Var Constant(Tensor value);
Var Leaf(Tensor value, bool requires_grad = true);

// Builds an op node; `backward` is skipped when no parent needs a gradient.
Var MakeOp(Tensor value, std::vector<Var> parents,
           std::function<void(Node&)> backward);

// Seeds d(root)/d(root) = 1 on a 1x1 root and propagates to every leaf.
void Backward(const Var& root);

// Linear algebra.
Var MatMul(const Var& a, const Var& b);
Var MatMulNT(const Var& a, const Var& b);  // a * b^T
Var Add(const Var& a, const Var& b);
Var AddBias(const Var& a, const Var& bias);  // bias is 1 x cols, added per row
Var Scale(const Var& a, double s);

// Shape manipulation.
Var ConcatCols(std::span<const Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var SliceRows(const Var& a, size_t begin, size_t end);
Var SliceCols(const Var& a, size_t begin, size_t end);
Var GatherRows(const Var& table, std::span<const int> ids);
// Row i of the result is rows [i, i + height) of `a` laid end to end, i.e.
// the receptive fields of a full-width convolution with kernel height
// `height`.
Var Windows(const Var& a, size_t height);

// Reductions.
Var MaxOverRows(const Var& a);   // 1 x cols
Var MeanOverRows(const Var& a);  // 1 x cols

// Elementwise and row-wise maps.
Var Tanh(const Var& a);
Var Gelu(const Var& a);
Var SoftmaxRows(const Var& a);
Var LayerNormRows(const Var& a, const Var& gamma, const Var& beta,
                  double eps = 1e-5);
Var L2NormalizeRows(const Var& a, double eps = 1e-12);

}  // namespace cosmos::ag

#endif  // COSMOS_AUTOGRAD_H_
