#include "cosmos/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cosmos/evaluator.h"
#include "cosmos/io.h"
#include "cosmos/losses.h"

namespace cosmos {
namespace {

std::vector<int> LabelsOf(std::span<const Example> examples) {
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) {
    if (!e.label) throw InputError("training example without a label");
    labels.push_back(*e.label);
  }
  return labels;
}

std::vector<EncodedExample> EncodeAll(const CosmosModel& model, std::span<const Example> examples) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(model.Encode(e));
  return out;
}

double F1OrZero(std::span<const int> predictions, std::span<const int> labels) {
  MetricReport r = ComputeMetrics(predictions, labels);
  return r.f1.value_or(0.0);
}

std::vector<int> Decisions(const CosmosModel& model, std::span<const EncodedExample> inputs) {
  std::vector<int> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(Decide(model.PredictPositive(in)));
  return out;
}

}  // namespace

Splits SplitDataset(std::vector<Example> pool, uint64_t seed) {
  if (pool.empty()) throw InputError("cannot split an empty dataset");
  for (const auto& e : pool) {
    if (!e.label) throw InputError("cannot split a dataset with unlabeled examples");
  }
  Rng rng(seed);
  rng.Shuffle(std::span<Example>(pool));
  const size_t n = pool.size();
  const size_t n_test = static_cast<size_t>(std::llround(0.3 * static_cast<double>(n)));
  const size_t n_trainval = n - n_test;
  const size_t n_val = static_cast<size_t>(std::llround(0.2 * static_cast<double>(n_trainval)));
  Splits s;
  auto begin = std::make_move_iterator(pool.begin());
  s.test.assign(begin, begin + n_test);
  s.val.assign(begin + n_test, begin + n_test + n_val);
  s.train.assign(begin + n_test + n_val, std::make_move_iterator(pool.end()));
  bool pos = false, neg = false;
  for (const auto& e : s.train) (*e.label ? pos : neg) = true;
  if (!pos || !neg) throw InputError("training split does not contain both classes");
  return s;
}

std::vector<std::vector<size_t>> MakeBatches(std::span<const int> labels, size_t batch_size,
                                             Rng& rng) {
  if (batch_size < 2) throw InputError("batch size must be at least 2");
  std::vector<size_t> pos, neg;
  for (size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw InputError("training set must contain both classes");
  rng.Shuffle(std::span<size_t>(pos));
  rng.Shuffle(std::span<size_t>(neg));
  const size_t n = labels.size();
  const size_t batches = std::min({(n + batch_size - 1) / batch_size, pos.size(), neg.size()});
  std::vector<std::vector<size_t>> out(batches);
  std::vector<size_t> rest;
  for (size_t b = 0; b < batches; ++b) out[b] = {pos[b], neg[b]};
  rest.insert(rest.end(), pos.begin() + batches, pos.end());
  rest.insert(rest.end(), neg.begin() + batches, neg.end());
  rng.Shuffle(std::span<size_t>(rest));
  for (size_t i = 0; i < rest.size(); ++i) out[i % batches].push_back(rest[i]);
  return out;
}

UnlabeledCursor::UnlabeledCursor(size_t pool_size, Rng& rng) : rng_(rng), order_(pool_size) {
  for (size_t i = 0; i < pool_size; ++i) order_[i] = i;
  rng_.Shuffle(std::span<size_t>(order_));
}

std::vector<size_t> UnlabeledCursor::Take(size_t count) {
  if (order_.empty()) throw InputError("unlabeled pool is empty");
  std::vector<size_t> out;
  out.reserve(count);
  while (out.size() < count) {
    if (next_ == order_.size()) {
      rng_.Shuffle(std::span<size_t>(order_));
      next_ = 0;
    }
    out.push_back(order_[next_++]);
  }
  return out;
}

Adam::Adam(std::vector<ag::Var> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_) {
    m_.emplace_back(p->value.rows(), p->value.cols());
    v_.emplace_back(p->value.rows(), p->value.cols());
  }
}

void Adam::Step() {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor& g = params_[i]->Grad();
    Tensor& w = params_[i]->value;
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (size_t j = 0; j < w.size(); ++j) {
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      w[j] -= lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps_);
    }
  }
}

void Adam::ZeroGrad() {
  for (auto& p : params_) p->Grad().Fill(0.0);
}

std::vector<double> PredictProbabilities(const CosmosModel& model,
                                         std::span<const Example> examples) {
  std::vector<double> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(model.PredictPositive(model.Encode(e)));
  return out;
}

TrainResult Train(CosmosModel& model, std::span<const Example> train,
                  std::span<const Example> val, std::span<const Example> unlabeled,
                  const TrainOptions& options, std::ostream* log) {
  const ModelConfig& config = model.config();
  if (options.max_epochs < 1) throw InputError("max_epochs must be at least 1");
  if (options.patience < 1) throw InputError("patience must be at least 1");
  if (config.use_ssl && unlabeled.empty()) {
    throw InputError("semi-supervised training needs a non-empty unlabeled pool");
  }
  const std::vector<int> train_labels = LabelsOf(train);
  const std::vector<int> val_labels = LabelsOf(val);
  const auto train_inputs = EncodeAll(model, train);
  const auto val_inputs = EncodeAll(model, val);
  const auto unlabeled_inputs =
      config.use_ssl ? EncodeAll(model, unlabeled) : std::vector<EncodedExample>{};

  std::vector<ag::Var> params;
  for (const auto& p : model.parameters()) params.push_back(p.var);
  Adam adam(params, config.lr);
  Rng rng(config.seed);
  Rng unlabeled_rng(config.seed ^ 0x5DEECE66DULL);
  std::optional<UnlabeledCursor> cursor;
  if (config.use_ssl) cursor.emplace(unlabeled_inputs.size(), unlabeled_rng);
  const double lambda = losses::EffectiveLambda(config);

  TrainResult result;
  std::vector<Tensor> best_params = model.SnapshotParameters();
  int stale = 0;
  for (int t = 0; t < options.max_epochs; ++t) {
    auto batches = MakeBatches(train_labels, options.batch_size, rng);
    const int total = static_cast<int>(batches.size());
    double loss_sum = 0.0;
    size_t correct = 0;
    for (int b = 1; b <= total; ++b) {
      const auto& batch = batches[b - 1];
      std::vector<ag::Var> probs, feats;
      std::vector<int> labels;
      for (size_t idx : batch) {
        Representations r = model.Forward(train_inputs[idx]);
        probs.push_back(ag::SliceCols(r.y_pred, 1, 2));
        feats.push_back(r.h_scl);
        labels.push_back(train_labels[idx]);
        if (Decide(r.y_pred->value[1]) == train_labels[idx]) ++correct;
      }
      ag::Var ce = losses::CeLossOp(ag::ConcatRows(probs), labels);
      ag::Var loss = ag::Scale(ce, 1.0 - lambda);
      double scl_value = 0.0;
      if (config.use_scl && labels.size() >= 2) {
        ag::Var scl = losses::SclLossOp(ag::ConcatRows(feats), labels, config.tau);
        scl_value = scl->value[0];
        loss = ag::Add(loss, ag::Scale(scl, lambda));
      }
      const double alpha = losses::EffectiveAlpha(config, b, t, total);
      double lu_value = 0.0;
      if (config.use_ssl) {
        std::vector<ag::Var> rows;
        for (size_t idx : cursor->Take(options.unlabeled_batch_size)) {
          rows.push_back(model.Forward(unlabeled_inputs[idx]).y_pred);
        }
        ag::Var y = ag::ConcatRows(rows);
        ag::Var lu = losses::CeLossOp(ag::SliceCols(y, 1, 2), losses::PseudoLabels(y->value));
        lu_value = lu->value[0];
        if (alpha != 0.0) loss = ag::Add(loss, ag::Scale(lu, alpha));
      }
      const double total_loss = loss->value[0];
      if (log) {
        *log << JsonLine({{"epoch", t},
                          {"batch", b},
                          {"L_CE", ce->value[0]},
                          {"L_SCL", scl_value},
                          {"L_U", lu_value},
                          {"alpha", alpha},
                          {"lambda", lambda},
                          {"L", total_loss}});
      }
      if (!std::isfinite(total_loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << t << " batch " << b << " (L_CE=" << ce->value[0]
            << ", L_SCL=" << scl_value << ", L_U=" << lu_value << ")";
        throw TrainingError(msg.str());
      }
      loss_sum += total_loss;
      adam.ZeroGrad();
      ag::Backward(loss);
      adam.Step();
    }

    EpochSummary summary;
    summary.epoch = t;
    summary.mean_loss = loss_sum / total;
    summary.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    summary.monitor_f1 = val.empty()
                             ? F1OrZero(Decisions(model, train_inputs), train_labels)
                             : F1OrZero(Decisions(model, val_inputs), val_labels);
    result.history.push_back(summary);
    result.epochs_run = t + 1;
    if (result.best_epoch < 0 || summary.monitor_f1 > result.best_f1) {
      result.best_epoch = t;
      result.best_f1 = summary.monitor_f1;
      best_params = model.SnapshotParameters();
      stale = 0;
    } else if (++stale >= options.patience) {
      break;
    }
  }
  model.RestoreParameters(best_params);
  return result;
}

GridSearchResult GridSearch(const ModelConfig& base, const ParamGrid& grid, const Splits& splits,
                            std::span<const Example> unlabeled, const TrainOptions& options,
                            std::ostream* log) {
  if (grid.lambdas.empty() || grid.taus.empty() || grid.gammas.empty()) {
    throw InputError("every grid axis needs at least one value");
  }
  GridSearchResult out;
  double best_f1 = -1.0;
  for (double lambda : grid.lambdas) {
    for (double tau : grid.taus) {
      for (double gamma : grid.gammas) {
        ModelConfig config = base;
        config.lambda = lambda;
        config.tau = tau;
        config.gamma = gamma;
        config.Validate();
        CosmosModel model(config);
        TrainResult r = Train(model, splits.train, splits.val, unlabeled, options);
        GridEntry entry{lambda, tau, gamma, r.best_f1, r.best_epoch};
        if (log) {
          *log << JsonLine({{"lambda", lambda},
                            {"tau", tau},
                            {"gamma", gamma},
                            {"val_f1", r.best_f1},
                            {"best_epoch", r.best_epoch}});
        }
        if (entry.val_f1 > best_f1) {
          best_f1 = entry.val_f1;
          out.best = out.table.size();
          out.best_config = config;
        }
        out.table.push_back(entry);
      }
    }
  }
  return out;
}

}  // namespace cosmos
