#include "cosmos/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cosmos/kernels.h"

namespace cosmos::losses {
namespace {

void CheckLengths(size_t a, size_t b) {
  if (a != b) throw std::invalid_argument("prediction and label counts differ");
  if (a == 0) throw std::invalid_argument("empty batch");
}

double Clamp(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

// Row-softmax over k != i of the scaled similarities, and each anchor's
// positive count. probs(i, i) = 0.
struct SclTerms {
  Tensor logits;  // h h^T / tau
  Tensor probs;
  std::vector<int> positives;
};

SclTerms ComputeSclTerms(const Tensor& h, std::span<const int> labels, double tau) {
  const size_t n = h.rows();
  if (labels.size() != n) throw std::invalid_argument("SclLoss: label count mismatch");
  if (n < 2) throw std::invalid_argument("SclLoss needs a batch of at least 2");
  if (!(tau > 0.0)) throw std::invalid_argument("SclLoss: tau must be positive");
  SclTerms t;
  t.logits = MatMulNT(h, h);
  for (size_t i = 0; i < t.logits.size(); ++i) t.logits[i] /= tau;
  t.probs = Tensor(n, n);
  t.positives.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < n; ++k) {
      if (k != i) mx = std::max(mx, t.logits(i, k));
    }
    double sum = 0.0;
    for (size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      t.probs(i, k) = std::exp(t.logits(i, k) - mx);
      sum += t.probs(i, k);
      if (labels[k] == labels[i]) ++t.positives[i];
    }
    for (size_t k = 0; k < n; ++k) t.probs(i, k) /= sum;
  }
  return t;
}

}  // namespace

double CeLoss(std::span<const double> y_pred, std::span<const int> y_true) {
  CheckLengths(y_pred.size(), y_true.size());
  double sum = 0.0;
  for (size_t i = 0; i < y_pred.size(); ++i) {
    const double p = Clamp(y_pred[i]);
    sum += y_true[i] ? std::log(p) : std::log(1.0 - p);
  }
  return -sum / y_pred.size();
}

std::vector<double> CeLossGrad(std::span<const double> y_pred, std::span<const int> y_true) {
  CheckLengths(y_pred.size(), y_true.size());
  const double n = static_cast<double>(y_pred.size());
  std::vector<double> g(y_pred.size(), 0.0);
  for (size_t i = 0; i < y_pred.size(); ++i) {
    const double p = y_pred[i];
    if (p < kProbClamp || p > 1.0 - kProbClamp) continue;
    g[i] = y_true[i] ? -1.0 / (p * n) : 1.0 / ((1.0 - p) * n);
  }
  return g;
}

double SclLoss(const Tensor& h, std::span<const int> labels, double tau) {
  SclTerms t = ComputeSclTerms(h, labels, tau);
  double total = 0.0;
  for (size_t i = 0; i < h.rows(); ++i) {
    if (t.positives[i] == 0) continue;
    double anchor = 0.0;
    for (size_t j = 0; j < h.rows(); ++j) {
      if (j != i && labels[j] == labels[i]) anchor += std::log(t.probs(i, j));
    }
    total -= anchor / t.positives[i];
  }
  return total;
}

Tensor SclLossGrad(const Tensor& h, std::span<const int> labels, double tau) {
  SclTerms t = ComputeSclTerms(h, labels, tau);
  const size_t n = h.rows();
  // dL/dlogits(i, k) = p_ik - [k positive for i] / P_i, for anchors with P_i > 0.
  Tensor g(n, n);
  for (size_t i = 0; i < n; ++i) {
    if (t.positives[i] == 0) continue;
    for (size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      g(i, k) = t.probs(i, k) - (labels[k] == labels[i] ? 1.0 / t.positives[i] : 0.0);
    }
  }
  // logits = h h^T / tau, so dh = (g + g^T) h / tau.
  Tensor sym(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < n; ++k) sym(i, k) = (g(i, k) + g(k, i)) / tau;
  }
  return MatMul(sym, h);
}

double AlphaSchedule(int b, int t, int batches, double c1, double c2, double gamma) {
  if (batches <= 0 || b < 1 || b > batches || t < 0) {
    throw std::invalid_argument("AlphaSchedule needs 1 <= b <= B and t >= 0");
  }
  const double bb = static_cast<double>(b), total = static_cast<double>(batches);
  if (bb <= c1 * total) return 0.0;
  if (bb <= c2 * total) return (bb / total) * (gamma / (t + 1));
  return 1.0;
}

std::vector<int> PseudoLabels(const Tensor& probs) {
  if (probs.cols() != 2) throw std::invalid_argument("PseudoLabels expects N x 2");
  std::vector<int> out(probs.rows());
  for (size_t i = 0; i < probs.rows(); ++i) out[i] = PseudoLabel(probs(i, 0), probs(i, 1));
  return out;
}

double PseudoLabelLoss(const Tensor& probs) {
  std::vector<int> labels = PseudoLabels(probs);
  std::vector<double> positive(probs.rows());
  for (size_t i = 0; i < probs.rows(); ++i) positive[i] = probs(i, 1);
  return CeLoss(positive, labels);
}

double EffectiveLambda(const ModelConfig& config) {
  return config.use_scl ? config.lambda : 0.0;
}

double EffectiveAlpha(const ModelConfig& config, int b, int t, int batches) {
  if (!config.use_ssl) return 0.0;
  return AlphaSchedule(b, t, batches, config.c1, config.c2, config.gamma);
}

ag::Var CeLossOp(const ag::Var& probs, std::vector<int> labels) {
  if (probs->value.cols() != 1) throw std::invalid_argument("CeLossOp expects N x 1");
  const double loss = CeLoss(probs->value.values(), labels);
  return ag::MakeOp(Tensor(1, 1, loss), {probs}, [labels = std::move(labels)](ag::Node& n) {
    auto g = CeLossGrad(n.parent(0)->value.values(), labels);
    kernels::Axpy(n.grad[0], g.data(), n.parent(0)->Grad().data(), g.size());
  });
}

ag::Var SclLossOp(const ag::Var& h, std::vector<int> labels, double tau) {
  const double loss = SclLoss(h->value, labels, tau);
  return ag::MakeOp(Tensor(1, 1, loss), {h}, [labels = std::move(labels), tau](ag::Node& n) {
    Tensor g = SclLossGrad(n.parent(0)->value, labels, tau);
    kernels::Axpy(n.grad[0], g.data(), n.parent(0)->Grad().data(), g.size());
  });
}

}  // namespace cosmos::losses
