#ifndef COSMOS_TRAINER_H_
#define COSMOS_TRAINER_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "cosmos/config.h"
#include "cosmos/context.h"
#include "cosmos/encoder.h"
#include "cosmos/random.h"
#include "json.hpp"

namespace cosmos {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Splits {
  std::vector<Example> train, val, test;
};

// Shuffles with `seed`, holds out round(0.3 n) as test, then round(0.2 m) of
// the remaining m as validation. Throws InputError when an example is
// unlabeled or the training part lacks one of the classes.
Splits SplitDataset(std::vector<Example> pool, uint64_t seed);

// One epoch of stratified labeled batches (indices into `labels`). Uses
// B = min(ceil(n / batch_size), #pos, #neg) batches; batch i first receives
// one positive and one negative, the remaining samples are dealt round-robin
// in shuffled order. Every sample appears exactly once.
std::vector<std::vector<size_t>> MakeBatches(std::span<const int> labels, size_t batch_size,
                                             Rng& rng);

// Cyclic draws from an unlabeled pool; the order is reshuffled each time the
// pool wraps.
class UnlabeledCursor {
 public:
  UnlabeledCursor(size_t pool_size, Rng& rng);
  std::vector<size_t> Take(size_t count);

 private:
  Rng& rng_;
  std::vector<size_t> order_;
  size_t next_ = 0;
};

// Adam with the usual moment defaults.
class Adam {
 public:
  Adam(std::vector<ag::Var> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void Step();
  void ZeroGrad();

 private:
  std::vector<ag::Var> params_;
  std::vector<Tensor> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  int64_t step_ = 0;
};

struct TrainOptions {
  int max_epochs = 50;
  int patience = 5;
  size_t batch_size = 16;
  size_t unlabeled_batch_size = 16;
};

struct EpochSummary {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double monitor_f1 = 0.0;
};

struct TrainResult {
  int best_epoch = -1;
  double best_f1 = 0.0;
  int epochs_run = 0;
  std::vector<EpochSummary> history;
};

// Mixed labeled/unlabeled training with early stopping on validation F1
// (training F1 when `val` is empty). Each batch writes one JSONL record
// {epoch, batch, L_CE, L_SCL, L_U, alpha, L} to `log` when non-null. The
// model ends up holding the best-epoch parameters. Throws TrainingError on a
// non-finite loss.
TrainResult Train(CosmosModel& model, std::span<const Example> train,
                  std::span<const Example> val, std::span<const Example> unlabeled,
                  const TrainOptions& options, std::ostream* log = nullptr);

// Positive-class probabilities for every example.
std::vector<double> PredictProbabilities(const CosmosModel& model,
                                         std::span<const Example> examples);

struct ParamGrid {
  std::vector<double> lambdas, taus, gammas;
};

struct GridEntry {
  double lambda = 0.0, tau = 0.0, gamma = 0.0;
  double val_f1 = 0.0;
  int best_epoch = -1;
};

struct GridSearchResult {
  std::vector<GridEntry> table;  // grid order: lambda, then tau, then gamma
  size_t best = 0;               // first entry with the highest F1
  ModelConfig best_config;
};

GridSearchResult GridSearch(const ModelConfig& base, const ParamGrid& grid, const Splits& splits,
                            std::span<const Example> unlabeled, const TrainOptions& options,
                            std::ostream* log = nullptr);

}  // namespace cosmos

#endif  // COSMOS_TRAINER_H_
