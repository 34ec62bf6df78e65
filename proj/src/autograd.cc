#include "cosmos/autograd.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "cosmos/kernels.h"

namespace cosmos::ag {
namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool Wants(const Var& v) { return v->requires_grad; }

}  // namespace

Tensor& Node::Grad() {
  if (grad.empty() && !value.empty()) grad = Tensor(value.rows(), value.cols());
  return grad;
}

Var Constant(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return node;
}

Var Leaf(Tensor value, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  return node;
}

Var MakeOp(Tensor value, std::vector<Var> parents,
           std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const Var& p : parents) node->requires_grad |= p->requires_grad;
  node->parents = std::move(parents);
  if (node->requires_grad) node->backward = std::move(backward);
  return node;
}

void Backward(const Var& root) {
  Require(root->value.rows() == 1 && root->value.cols() == 1,
          "Backward expects a scalar root");
  if (!root->requires_grad) return;
  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->Grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
}

Var MatMul(const Var& a, const Var& b) {
  Require(a->value.cols() == b->value.rows(), "MatMul shape mismatch");
  return MakeOp(cosmos::MatMul(a->value, b->value), {a, b}, [](Node& n) {
    const Var& a = n.parent(0);
    const Var& b = n.parent(1);
    const size_t m = a->value.rows(), k = a->value.cols(), c = b->value.cols();
    if (Wants(a)) kernels::GemmNT(n.grad.data(), b->value.data(), a->Grad().data(), m, c, k);
    if (Wants(b)) kernels::GemmTN(a->value.data(), n.grad.data(), b->Grad().data(), k, m, c);
  });
}

Var MatMulNT(const Var& a, const Var& b) {
  Require(a->value.cols() == b->value.cols(), "MatMulNT shape mismatch");
  return MakeOp(cosmos::MatMulNT(a->value, b->value), {a, b}, [](Node& n) {
    const Var& a = n.parent(0);
    const Var& b = n.parent(1);
    const size_t m = a->value.rows(), k = a->value.cols(), r = b->value.rows();
    // out = a b^T; d a = g b, d b = g^T a
    if (Wants(a)) kernels::GemmNN(n.grad.data(), b->value.data(), a->Grad().data(), m, r, k);
    if (Wants(b)) kernels::GemmTN(n.grad.data(), a->value.data(), b->Grad().data(), r, m, k);
  });
}

Var Add(const Var& a, const Var& b) {
  Require(a->value.SameShape(b->value), "Add shape mismatch");
  Tensor out = a->value;
  out.AddInPlace(b->value);
  return MakeOp(std::move(out), {a, b}, [](Node& n) {
    for (size_t i = 0; i < 2; ++i) {
      if (Wants(n.parent(i))) n.parent(i)->Grad().AddInPlace(n.grad);
    }
  });
}

Var AddBias(const Var& a, const Var& bias) {
  Require(bias->value.rows() == 1 && bias->value.cols() == a->value.cols(),
          "AddBias shape mismatch");
  Tensor out = a->value;
  for (size_t r = 0; r < out.rows(); ++r) {
    kernels::Axpy(1.0, bias->value.data(), out.row(r).data(), out.cols());
  }
  return MakeOp(std::move(out), {a, bias}, [](Node& n) {
    if (Wants(n.parent(0))) n.parent(0)->Grad().AddInPlace(n.grad);
    if (Wants(n.parent(1))) {
      Tensor& gb = n.parent(1)->Grad();
      for (size_t r = 0; r < n.grad.rows(); ++r) {
        kernels::Axpy(1.0, n.grad.row(r).data(), gb.data(), gb.cols());
      }
    }
  });
}

Var Scale(const Var& a, double s) {
  Tensor out(a->value.rows(), a->value.cols());
  kernels::Axpy(s, a->value.data(), out.data(), out.size());
  return MakeOp(std::move(out), {a}, [s](Node& n) {
    kernels::Axpy(s, n.grad.data(), n.parent(0)->Grad().data(), n.grad.size());
  });
}

Var ConcatCols(std::span<const Var> parts) {
  Require(!parts.empty(), "ConcatCols of nothing");
  const size_t rows = parts[0]->value.rows();
  size_t cols = 0;
  for (const Var& p : parts) {
    Require(p->value.rows() == rows, "ConcatCols row mismatch");
    cols += p->value.cols();
  }
  Tensor out(rows, cols);
  size_t offset = 0;
  for (const Var& p : parts) {
    for (size_t r = 0; r < rows; ++r) {
      auto src = p->value.row(r);
      std::copy(src.begin(), src.end(), out.row(r).begin() + offset);
    }
    offset += p->value.cols();
  }
  return MakeOp(std::move(out), {parts.begin(), parts.end()}, [](Node& n) {
    size_t offset = 0;
    for (const Var& p : n.parents) {
      const size_t w = p->value.cols();
      if (Wants(p)) {
        Tensor& g = p->Grad();
        for (size_t r = 0; r < g.rows(); ++r) {
          kernels::Axpy(1.0, n.grad.row(r).data() + offset, g.row(r).data(), w);
        }
      }
      offset += w;
    }
  });
}

Var ConcatRows(std::span<const Var> parts) {
  Require(!parts.empty(), "ConcatRows of nothing");
  const size_t cols = parts[0]->value.cols();
  size_t rows = 0;
  for (const Var& p : parts) {
    Require(p->value.cols() == cols, "ConcatRows column mismatch");
    rows += p->value.rows();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const Var& p : parts) {
    data.insert(data.end(), p->value.values().begin(), p->value.values().end());
  }
  return MakeOp(Tensor(rows, cols, std::move(data)), {parts.begin(), parts.end()},
                [](Node& n) {
                  size_t offset = 0;
                  for (const Var& p : n.parents) {
                    const size_t len = p->value.size();
                    if (Wants(p)) {
                      kernels::Axpy(1.0, n.grad.data() + offset, p->Grad().data(), len);
                    }
                    offset += len;
                  }
                });
}

Var SliceRows(const Var& a, size_t begin, size_t end) {
  Require(begin <= end && end <= a->value.rows(), "SliceRows out of range");
  const size_t cols = a->value.cols();
  std::vector<double> data(a->value.data() + begin * cols, a->value.data() + end * cols);
  return MakeOp(Tensor(end - begin, cols, std::move(data)), {a}, [begin](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    kernels::Axpy(1.0, n.grad.data(), g.data() + begin * g.cols(), n.grad.size());
  });
}

Var SliceCols(const Var& a, size_t begin, size_t end) {
  Require(begin <= end && end <= a->value.cols(), "SliceCols out of range");
  Tensor out(a->value.rows(), end - begin);
  for (size_t r = 0; r < out.rows(); ++r) {
    auto src = a->value.row(r);
    std::copy(src.begin() + begin, src.begin() + end, out.row(r).begin());
  }
  return MakeOp(std::move(out), {a}, [begin](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    for (size_t r = 0; r < n.grad.rows(); ++r) {
      kernels::Axpy(1.0, n.grad.row(r).data(), g.row(r).data() + begin, n.grad.cols());
    }
  });
}

Var GatherRows(const Var& table, std::span<const int> ids) {
  const size_t cols = table->value.cols();
  Tensor out(ids.size(), cols);
  for (size_t i = 0; i < ids.size(); ++i) {
    Require(ids[i] >= 0 && static_cast<size_t>(ids[i]) < table->value.rows(),
            "GatherRows id out of range");
    auto src = table->value.row(ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<int> kept(ids.begin(), ids.end());
  return MakeOp(std::move(out), {table}, [kept = std::move(kept)](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    for (size_t i = 0; i < kept.size(); ++i) {
      kernels::Axpy(1.0, n.grad.row(i).data(), g.row(kept[i]).data(), g.cols());
    }
  });
}

Var Windows(const Var& a, size_t height) {
  const size_t rows = a->value.rows(), cols = a->value.cols();
  Require(height >= 1 && height <= rows, "Windows height exceeds input rows");
  const size_t out_rows = rows - height + 1;
  const size_t width = height * cols;
  Tensor out(out_rows, width);
  for (size_t i = 0; i < out_rows; ++i) {
    std::copy(a->value.data() + i * cols, a->value.data() + i * cols + width,
              out.row(i).begin());
  }
  return MakeOp(std::move(out), {a}, [width](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    const size_t cols = g.cols();
    for (size_t i = 0; i < n.grad.rows(); ++i) {
      kernels::Axpy(1.0, n.grad.row(i).data(), g.data() + i * cols, width);
    }
  });
}

Var MaxOverRows(const Var& a) {
  const size_t rows = a->value.rows(), cols = a->value.cols();
  Require(rows > 0, "MaxOverRows of empty tensor");
  Tensor out(1, cols);
  std::vector<size_t> argmax(cols, 0);
  for (size_t c = 0; c < cols; ++c) {
    double best = a->value(0, c);
    for (size_t r = 1; r < rows; ++r) {
      if (a->value(r, c) > best) {
        best = a->value(r, c);
        argmax[c] = r;
      }
    }
    out[c] = best;
  }
  return MakeOp(std::move(out), {a}, [argmax = std::move(argmax)](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    for (size_t c = 0; c < argmax.size(); ++c) g(argmax[c], c) += n.grad[c];
  });
}

Var MeanOverRows(const Var& a) {
  const size_t rows = a->value.rows(), cols = a->value.cols();
  Require(rows > 0, "MeanOverRows of empty tensor");
  Tensor out(1, cols);
  for (size_t r = 0; r < rows; ++r) {
    kernels::Axpy(1.0 / rows, a->value.row(r).data(), out.data(), cols);
  }
  return MakeOp(std::move(out), {a}, [](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    const double w = 1.0 / g.rows();
    for (size_t r = 0; r < g.rows(); ++r) {
      kernels::Axpy(w, n.grad.data(), g.row(r).data(), g.cols());
    }
  });
}

Var Tanh(const Var& a) {
  Tensor out(a->value.rows(), a->value.cols());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(a->value[i]);
  return MakeOp(std::move(out), {a}, [](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    for (size_t i = 0; i < g.size(); ++i) {
      g[i] += n.grad[i] * (1.0 - n.value[i] * n.value[i]);
    }
  });
}

Var Gelu(const Var& a) {
  Tensor out(a->value.rows(), a->value.cols());
  for (size_t i = 0; i < out.size(); ++i) {
    const double x = a->value[i];
    out[i] = 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
  }
  return MakeOp(std::move(out), {a}, [](Node& n) {
    const Var& a = n.parent(0);
    Tensor& g = a->Grad();
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (size_t i = 0; i < g.size(); ++i) {
      const double x = a->value[i];
      const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
      const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
      g[i] += n.grad[i] * (cdf + x * pdf);
    }
  });
}

Var SoftmaxRows(const Var& a) {
  Tensor out(a->value.rows(), a->value.cols());
  for (size_t r = 0; r < out.rows(); ++r) {
    auto in = a->value.row(r);
    auto dst = out.row(r);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : in) mx = std::max(mx, v);
    double sum = 0.0;
    for (size_t c = 0; c < in.size(); ++c) sum += dst[c] = std::exp(in[c] - mx);
    for (double& v : dst) v /= sum;
  }
  return MakeOp(std::move(out), {a}, [](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    for (size_t r = 0; r < g.rows(); ++r) {
      auto y = n.value.row(r);
      auto gy = n.grad.row(r);
      const double dot = kernels::Dot(y.data(), gy.data(), y.size());
      auto gx = g.row(r);
      for (size_t c = 0; c < y.size(); ++c) gx[c] += y[c] * (gy[c] - dot);
    }
  });
}

Var LayerNormRows(const Var& a, const Var& gamma, const Var& beta, double eps) {
  const size_t rows = a->value.rows(), cols = a->value.cols();
  Require(gamma->value.rows() == 1 && gamma->value.cols() == cols &&
              beta->value.SameShape(gamma->value),
          "LayerNormRows parameter shape mismatch");
  Tensor out(rows, cols);
  Tensor normed(rows, cols);
  std::vector<double> inv_std(rows);
  for (size_t r = 0; r < rows; ++r) {
    auto x = a->value.row(r);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= cols;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= cols;
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (size_t c = 0; c < cols; ++c) {
      normed(r, c) = (x[c] - mean) * inv_std[r];
      out(r, c) = gamma->value[c] * normed(r, c) + beta->value[c];
    }
  }
  return MakeOp(std::move(out), {a, gamma, beta},
                [normed = std::move(normed), inv_std = std::move(inv_std)](Node& n) {
                  const Var& a = n.parent(0);
                  const Var& gamma = n.parent(1);
                  const Var& beta = n.parent(2);
                  const size_t rows = n.grad.rows(), cols = n.grad.cols();
                  for (size_t r = 0; r < rows; ++r) {
                    auto g = n.grad.row(r);
                    auto xh = normed.row(r);
                    if (Wants(gamma)) {
                      Tensor& gg = gamma->Grad();
                      for (size_t c = 0; c < cols; ++c) gg[c] += g[c] * xh[c];
                    }
                    if (Wants(beta)) {
                      kernels::Axpy(1.0, g.data(), beta->Grad().data(), cols);
                    }
                    if (Wants(a)) {
                      double mean_d = 0.0, mean_dx = 0.0;
                      for (size_t c = 0; c < cols; ++c) {
                        const double d = g[c] * gamma->value[c];
                        mean_d += d;
                        mean_dx += d * xh[c];
                      }
                      mean_d /= cols;
                      mean_dx /= cols;
                      auto ga = a->Grad().row(r);
                      for (size_t c = 0; c < cols; ++c) {
                        const double d = g[c] * gamma->value[c];
                        ga[c] += inv_std[r] * (d - mean_d - xh[c] * mean_dx);
                      }
                    }
                  }
                });
}

Var L2NormalizeRows(const Var& a, double eps) {
  const size_t rows = a->value.rows(), cols = a->value.cols();
  Tensor out(rows, cols);
  std::vector<double> norms(rows);
  for (size_t r = 0; r < rows; ++r) {
    auto x = a->value.row(r);
    norms[r] = std::sqrt(kernels::Dot(x.data(), x.data(), cols) + eps);
    for (size_t c = 0; c < cols; ++c) out(r, c) = x[c] / norms[r];
  }
  return MakeOp(std::move(out), {a}, [norms = std::move(norms)](Node& n) {
    Tensor& g = n.parent(0)->Grad();
    for (size_t r = 0; r < g.rows(); ++r) {
      auto y = n.value.row(r);
      auto gy = n.grad.row(r);
      const double dot = kernels::Dot(y.data(), gy.data(), y.size());
      auto gx = g.row(r);
      for (size_t c = 0; c < y.size(); ++c) gx[c] += (gy[c] - y[c] * dot) / norms[r];
    }
  });
}

}  // namespace cosmos::ag
