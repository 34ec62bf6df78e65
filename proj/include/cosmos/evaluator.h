#ifndef COSMOS_EVALUATOR_H_
#define COSMOS_EVALUATOR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cosmos/context.h"
#include "json.hpp"

namespace cosmos {

// Positive-class decision rule: p > 0.5 (a tie goes to class 0, matching the
// argmax of a binary softmax).
inline int Decide(double positive_probability) { return positive_probability > 0.5 ? 1 : 0; }

struct Confusion {
  size_t tp = 0, fp = 0, fn = 0, tn = 0;
  size_t total() const { return tp + fp + fn + tn; }
};

// Metrics with a zero denominator stay empty rather than reading as 0.
struct MetricReport {
  Confusion confusion;
  std::optional<double> accuracy, precision, recall, f1;

  nlohmann::json ToJson() const;
};

Confusion CountConfusion(std::span<const int> predictions, std::span<const int> labels);
MetricReport MetricsFromConfusion(const Confusion& c);
// Throws InputError on empty or mismatched inputs.
MetricReport ComputeMetrics(std::span<const int> predictions, std::span<const int> labels);

struct PageOutcome {
  std::string page_id;
  int label = 0;
  int prediction = 0;
};

struct PageRecall {
  std::string page_id;
  size_t positives = 0;
  size_t hits = 0;
  double recall = 0.0;
};

struct PerPageReport {
  std::vector<PageRecall> pages;  // sorted by page_id
  double avg_recall = 0.0;
  double recall_std = 0.0;  // population
  double pooled_recall = 0.0;
  std::vector<std::string> excluded;  // pages with no positive example

  nlohmann::json ToJson() const;
};

// Recall of every page with at least one positive, their unweighted mean and
// population standard deviation, and the pooled recall. Pages without
// positives are listed in `excluded`. Throws InputError when no page has a
// positive.
PerPageReport PerPageRecall(std::span<const PageOutcome> outcomes);

// Overall metrics plus per-source sub-reports: all four metrics for manually
// labeled examples, recall only for LLM-labeled ones.
nlohmann::json SourceBreakdown(std::span<const Example> examples,
                               std::span<const int> predictions);

}  // namespace cosmos

#endif  // COSMOS_EVALUATOR_H_
