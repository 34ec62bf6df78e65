#include "cosmos/evaluator.h"

#include <algorithm>

#include "doctest.h"
#include "oracles.h"
#include "test_support.h"

namespace cosmos {
namespace {

std::vector<int> Repeat(std::initializer_list<std::pair<int, size_t>> parts) {
  std::vector<int> v;
  for (auto [value, count] : parts) v.insert(v.end(), count, value);
  return v;
}

TEST_CASE("hand case TP=2 FP=1 FN=1 TN=6") {
  // predictions / labels laid out cell by cell
  auto pred = Repeat({{1, 2}, {1, 1}, {0, 1}, {0, 6}});
  auto y = Repeat({{1, 2}, {0, 1}, {1, 1}, {0, 6}});
  MetricReport r = ComputeMetrics(pred, y);
  CHECK(r.confusion.tp == 2);
  CHECK(r.confusion.tn == 6);
  CHECK(*r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(*r.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(*r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(*r.accuracy == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("perfect predictions and undefined metrics") {
  std::vector<int> y = {1, 0, 1, 0};
  MetricReport r = ComputeMetrics(y, y);
  CHECK(*r.accuracy == 1.0);
  CHECK(*r.precision == 1.0);
  CHECK(*r.recall == 1.0);
  CHECK(*r.f1 == 1.0);
  std::vector<int> zeros = {0, 0, 0};
  MetricReport none = ComputeMetrics(zeros, zeros);
  CHECK_FALSE(none.precision.has_value());
  CHECK_FALSE(none.recall.has_value());
  CHECK_FALSE(none.f1.has_value());
  CHECK(none.ToJson()["precision"].is_null());
  CHECK_THROWS_AS(ComputeMetrics(std::vector<int>{}, std::vector<int>{}), InputError);
  CHECK_THROWS_AS(ComputeMetrics(std::vector<int>{1}, std::vector<int>{1, 0}), InputError);
}

TEST_CASE("metrics match the confusion oracle and the F1 bounds on random fixtures") {
  Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> pred(50), y(50);
    for (size_t i = 0; i < 50; ++i) {
      pred[i] = static_cast<int>(rng.Below(2));
      y[i] = static_cast<int>(rng.Below(2));
    }
    auto o = oracle::Confusion(pred, y);
    MetricReport r = ComputeMetrics(pred, y);
    CHECK(r.confusion.tp == o.tp);
    CHECK(r.confusion.fp == o.fp);
    CHECK(r.confusion.fn == o.fn);
    CHECK(r.confusion.tn == o.tn);
    CHECK(*r.accuracy == doctest::Approx(double(o.tp + o.tn) / 50));
    if (r.f1 && *r.precision > 0) {
      CHECK(*r.f1 <= std::max(*r.precision, *r.recall) + 1e-15);
      CHECK(*r.f1 >= std::min(*r.precision, *r.recall) - 1e-15);
    }
    std::vector<size_t> perm(50);
    for (size_t i = 0; i < 50; ++i) perm[i] = i;
    rng.Shuffle(std::span<size_t>(perm));
    std::vector<int> pp(50), yp(50);
    for (size_t i = 0; i < 50; ++i) {
      pp[i] = pred[perm[i]];
      yp[i] = y[perm[i]];
    }
    CHECK(ComputeMetrics(pp, yp).ToJson() == r.ToJson());
  }
}

TEST_CASE("per-page recall examples") {
  std::vector<PageOutcome> two = {{"a", 1, 1}, {"a", 1, 1}, {"b", 1, 1}, {"b", 1, 0}, {"b", 0, 1}};
  PerPageReport r = PerPageRecall(two);
  CHECK(r.avg_recall == doctest::Approx(0.75));
  CHECK(r.recall_std == doctest::Approx(0.25));
  CHECK(r.pooled_recall == doctest::Approx(0.75));
  std::vector<PageOutcome> one = {{"a", 1, 1}, {"a", 1, 0}, {"z", 0, 0}};
  PerPageReport s = PerPageRecall(one);
  CHECK(s.recall_std == 0.0);
  CHECK(s.excluded == std::vector<std::string>{"z"});
  std::vector<PageOutcome> empty = {{"z", 0, 1}};
  CHECK_THROWS_AS(PerPageRecall(empty), InputError);
}

TEST_CASE("per-page recall matches a loop oracle on random fixtures") {
  Rng rng(62);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PageOutcome> items;
    std::vector<std::string> page;
    std::vector<int> pred, y;
    for (int p = 0; p < 10; ++p) {
      const size_t k = 1 + rng.Below(8);
      for (size_t i = 0; i < k; ++i) {
        const int label = i == 0 ? 1 : static_cast<int>(rng.Below(2));
        const int guess = static_cast<int>(rng.Below(2));
        items.push_back({"page" + std::to_string(p), label, guess});
        page.push_back(items.back().page_id);
        pred.push_back(guess);
        y.push_back(label);
      }
    }
    auto o = oracle::PerPage(page, pred, y);
    PerPageReport r = PerPageRecall(items);
    REQUIRE(r.pages.size() == o.recall.size());
    for (const auto& pr : r.pages) CHECK(pr.recall == doctest::Approx(o.recall.at(pr.page_id)));
    CHECK(r.avg_recall == doctest::Approx(o.mean).epsilon(1e-12));
    CHECK(r.recall_std == doctest::Approx(o.std).epsilon(1e-12));
    CHECK(r.pooled_recall == doctest::Approx(o.pooled).epsilon(1e-12));
    // Pooled recall is the positive-count weighted mean of page recalls.
    double num = 0, den = 0;
    for (const auto& pr : r.pages) {
      num += pr.recall * pr.positives;
      den += pr.positives;
    }
    CHECK(r.pooled_recall == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("source breakdown reports recall only for llm labels") {
  auto examples = testing::ToyDataset(6, 1);
  examples[0].source = examples[1].source = LabelSource::kLlm;
  std::vector<int> pred = {1, 1, 0, 1, 0, 0};
  auto j = SourceBreakdown(examples, pred);
  REQUIRE(j.contains("manual"));
  REQUIRE(j.contains("llm"));
  CHECK(j["llm"].contains("recall"));
  CHECK_FALSE(j["llm"].contains("precision"));
  CHECK(j["manual"].contains("f1"));
  CHECK(Decide(0.5) == 0);
  CHECK(Decide(0.5000001) == 1);
}

}  // namespace
}  // namespace cosmos
