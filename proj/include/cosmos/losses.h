#ifndef COSMOS_LOSSES_H_
#define COSMOS_LOSSES_H_

#include <span>
#include <vector>

#include "cosmos/autograd.h"
#include "cosmos/config.h"
#include "cosmos/tensor.h"

namespace cosmos::losses {

// Probabilities entering a log are clamped to [kProbClamp, 1 - kProbClamp].
inline constexpr double kProbClamp = 1e-12;

// Binary cross-entropy, mean over the batch. y_pred[i] = P(y_i = 1).
double CeLoss(std::span<const double> y_pred, std::span<const int> y_true);
// d CeLoss / d y_pred; zero where the clamp is active.
std::vector<double> CeLossGrad(std::span<const double> y_pred, std::span<const int> y_true);

// Supervised contrastive loss over rows of `h` (N x k, unit rows expected).
// Positives of anchor i are the other samples with the same label; anchors
// whose label is unique in the batch contribute 0. Summed over anchors.
// Throws std::invalid_argument when N < 2.
double SclLoss(const Tensor& h, std::span<const int> labels, double tau);
Tensor SclLossGrad(const Tensor& h, std::span<const int> labels, double tau);

inline double SupervisedLoss(double ce, double scl, double lambda) {
  return (1.0 - lambda) * ce + lambda * scl;
}

// Weight of the pseudo-label term for batch b (1-based) of epoch t
// (0-based) with B batches per epoch.
double AlphaSchedule(int b, int t, int batches, double c1, double c2, double gamma);

// argmax over (P(y=0), P(y=1)); a tie goes to class 0.
inline int PseudoLabel(double p0, double p1) { return p1 > p0 ? 1 : 0; }

// Hard pseudo-labels for an N x 2 probability matrix.
std::vector<int> PseudoLabels(const Tensor& probs);

// CE of the positive-class probabilities against their own hard labels.
double PseudoLabelLoss(const Tensor& probs);

inline double TotalLoss(double supervised, double unlabeled, double alpha) {
  return supervised + alpha * unlabeled;
}

// Ablation switches: use_scl = false forces lambda to 0, use_ssl = false
// forces alpha to 0.
double EffectiveLambda(const ModelConfig& config);
double EffectiveAlpha(const ModelConfig& config, int b, int t, int batches);

// Differentiable versions for the training graph. `probs` is N x 1.
ag::Var CeLossOp(const ag::Var& probs, std::vector<int> labels);
ag::Var SclLossOp(const ag::Var& h, std::vector<int> labels, double tau);

}  // namespace cosmos::losses

#endif  // COSMOS_LOSSES_H_
