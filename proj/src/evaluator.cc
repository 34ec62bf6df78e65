#include "cosmos/evaluator.h"

#include <cmath>
#include <map>

#include "cosmos/io.h"

namespace cosmos {
namespace {

nlohmann::json Optional(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> Ratio(size_t num, size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

nlohmann::json MetricReport::ToJson() const {
  return {{"accuracy", Optional(accuracy)},
          {"precision", Optional(precision)},
          {"recall", Optional(recall)},
          {"f1", Optional(f1)},
          {"confusion",
           {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}, {"tn", confusion.tn}}},
          {"n", confusion.total()}};
}

Confusion CountConfusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw InputError("prediction and label counts differ");
  }
  Confusion c;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const bool p = predictions[i] != 0, y = labels[i] != 0;
    if (p && y) ++c.tp;
    else if (p) ++c.fp;
    else if (y) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricReport MetricsFromConfusion(const Confusion& c) {
  MetricReport r;
  r.confusion = c;
  r.accuracy = Ratio(c.tp + c.tn, c.total());
  r.precision = Ratio(c.tp, c.tp + c.fp);
  r.recall = Ratio(c.tp, c.tp + c.fn);
  if (r.precision && r.recall && *r.precision + *r.recall > 0.0) {
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  } else if (r.precision && r.recall) {
    r.f1 = 0.0;
  }
  return r;
}

MetricReport ComputeMetrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty()) throw InputError("cannot compute metrics on an empty set");
  return MetricsFromConfusion(CountConfusion(predictions, labels));
}

nlohmann::json PerPageReport::ToJson() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : pages) {
    list.push_back({{"page_id", p.page_id},
                    {"positives", p.positives},
                    {"hits", p.hits},
                    {"recall", p.recall}});
  }
  return {{"per_page", list},
          {"avg_recall", avg_recall},
          {"recall_std", recall_std},
          {"pooled_recall", pooled_recall},
          {"excluded_pages", excluded}};
}

PerPageReport PerPageRecall(std::span<const PageOutcome> outcomes) {
  std::map<std::string, PageRecall> by_page;
  for (const auto& o : outcomes) {
    PageRecall& p = by_page[o.page_id];
    p.page_id = o.page_id;
    if (o.label) {
      ++p.positives;
      if (o.prediction) ++p.hits;
    }
  }
  PerPageReport report;
  size_t positives = 0, hits = 0;
  for (auto& [id, p] : by_page) {
    if (p.positives == 0) {
      report.excluded.push_back(id);
      continue;
    }
    p.recall = static_cast<double>(p.hits) / static_cast<double>(p.positives);
    positives += p.positives;
    hits += p.hits;
    report.pages.push_back(p);
  }
  if (report.pages.empty()) throw InputError("no page has a positive example");
  const double n = static_cast<double>(report.pages.size());
  double mean = 0.0;
  for (const auto& p : report.pages) mean += p.recall;
  mean /= n;
  double var = 0.0;
  for (const auto& p : report.pages) var += (p.recall - mean) * (p.recall - mean);
  report.avg_recall = mean;
  report.recall_std = std::sqrt(var / n);
  report.pooled_recall = static_cast<double>(hits) / static_cast<double>(positives);
  return report;
}

nlohmann::json SourceBreakdown(std::span<const Example> examples,
                               std::span<const int> predictions) {
  if (examples.size() != predictions.size()) {
    throw InputError("prediction and example counts differ");
  }
  std::vector<int> manual_pred, manual_label, llm_pred, llm_label;
  for (size_t i = 0; i < examples.size(); ++i) {
    if (!examples[i].label) continue;
    if (examples[i].source == LabelSource::kManual) {
      manual_pred.push_back(predictions[i]);
      manual_label.push_back(*examples[i].label);
    } else if (examples[i].source == LabelSource::kLlm) {
      llm_pred.push_back(predictions[i]);
      llm_label.push_back(*examples[i].label);
    }
  }
  nlohmann::json out = nlohmann::json::object();
  if (!manual_pred.empty()) out["manual"] = ComputeMetrics(manual_pred, manual_label).ToJson();
  if (!llm_pred.empty()) {
    MetricReport r = ComputeMetrics(llm_pred, llm_label);
    out["llm"] = {{"recall", Optional(r.recall)}, {"n", r.confusion.total()}};
  }
  return out;
}

}  // namespace cosmos
