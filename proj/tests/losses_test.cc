#include "cosmos/losses.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "test_support.h"

namespace cosmos::losses {
namespace {

using testing::RandomTensor;

Tensor UnitRows(size_t n, size_t k, Rng& rng) {
  Tensor h = RandomTensor(n, k, rng);
  for (size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (double v : h.row(i)) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : h.row(i)) v /= norm;
  }
  return h;
}

TEST_CASE("cross-entropy examples") {
  const std::vector<double> p = {0.9, 0.2};
  const std::vector<int> y = {1, 0};
  CHECK(CeLoss(p, y) == doctest::Approx(-(std::log(0.9) + std::log(0.8)) / 2).epsilon(1e-12));
  const std::vector<double> sure = {1.0, 0.0};
  CHECK(CeLoss(sure, y) == doctest::Approx(0.0).epsilon(1e-9));
  // Clamping keeps a confidently wrong prediction finite.
  const std::vector<double> wrong = {0.0};
  const std::vector<int> one = {1};
  CHECK(CeLoss(wrong, one) == doctest::Approx(-std::log(1e-12)));
  CHECK_THROWS(CeLoss(std::vector<double>{}, std::vector<int>{}));
}

TEST_CASE("cross-entropy matches a scalar loop") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(8);
    std::vector<int> y(8);
    for (size_t i = 0; i < 8; ++i) {
      p[i] = rng.Uniform();
      y[i] = static_cast<int>(rng.Below(2));
    }
    CHECK(std::abs(CeLoss(p, y) - oracle::CeLoss(p, y)) <= 1e-9);
  }
}

TEST_CASE("contrastive loss closed forms") {
  // Identical unit vectors: every fraction is 1/(N-1).
  Tensor same(4, 3);
  for (size_t i = 0; i < 4; ++i) same(i, 0) = 1.0;
  const std::vector<int> balanced = {1, 1, 0, 0};
  CHECK(SclLoss(same, balanced, 0.1) == doctest::Approx(4.0 * std::log(3.0)).epsilon(1e-12));
  // A lone positive contributes nothing; the three negatives each see two
  // partners at 1/3.
  const std::vector<int> lone = {1, 0, 0, 0};
  CHECK(SclLoss(same, lone, 0.1) == doctest::Approx(3.0 * std::log(3.0)).epsilon(1e-12));
  // Every class a singleton -> 0.
  Tensor two(2, 3);
  two(0, 0) = two(1, 1) = 1.0;
  CHECK(SclLoss(two, std::vector<int>{0, 1}, 0.1) == 0.0);
  CHECK_THROWS_AS(SclLoss(Tensor(1, 3, 1.0), std::vector<int>{1}, 0.1), std::invalid_argument);
}

TEST_CASE("contrastive loss matches the triple-loop reference") {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = 2 + rng.Below(15);
    Tensor h = UnitRows(n, 5, rng);
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng.Below(2));
    CHECK(std::abs(SclLoss(h, y, 0.1) - oracle::SclLoss(h, y, 0.1)) <= 1e-6);
  }
}

TEST_CASE("contrastive loss is invariant to batch order") {
  Rng rng(23);
  Tensor h = UnitRows(7, 4, rng);
  std::vector<int> y = {1, 0, 1, 1, 0, 0, 1};
  std::vector<size_t> perm(7);
  std::iota(perm.begin(), perm.end(), 0);
  rng.Shuffle(std::span<size_t>(perm));
  Tensor hp(7, 4);
  std::vector<int> yp(7);
  for (size_t i = 0; i < 7; ++i) {
    std::copy(h.row(perm[i]).begin(), h.row(perm[i]).end(), hp.row(i).begin());
    yp[i] = y[perm[i]];
  }
  CHECK(SclLoss(hp, yp, 0.1) == doctest::Approx(SclLoss(h, y, 0.1)).epsilon(1e-12));
}

TEST_CASE("contrastive loss falls as same-label pairs move together") {
  // Positives at angle +-theta around the x axis, negatives fixed at -x and
  // +y; shrinking theta raises positive similarity and leaves the
  // positive/negative similarities' sum structure unchanged in sign.
  auto batch = [](double theta) {
    Tensor h(4, 2);
    h(0, 0) = std::cos(theta);
    h(0, 1) = std::sin(theta);
    h(1, 0) = std::cos(theta);
    h(1, 1) = -std::sin(theta);
    h(2, 0) = -1.0;
    h(3, 0) = -1.0;
    return h;
  };
  const std::vector<int> y = {1, 1, 0, 0};
  double prev = SclLoss(batch(1.2), y, 0.5);
  for (double theta : {0.9, 0.6, 0.3, 0.0}) {
    const double cur = SclLoss(batch(theta), y, 0.5);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("loss gradients match finite differences") {
  Rng rng(24);
  for (int trial = 0; trial < 5; ++trial) {
    const size_t n = 3 + rng.Below(6);
    ag::Var h = ag::Leaf(UnitRows(n, 4, rng));
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng.Below(2));
    y[0] = 0;
    y[1] = 1;
    auto r = testing::CheckGradients([&] { return SclLossOp(h, y, 0.1); }, {h});
    CHECK(r.max_rel_error <= 1e-3);
    Tensor p0(n, 1);
    for (size_t i = 0; i < n; ++i) p0[i] = rng.Uniform(0.05, 0.95);
    ag::Var p = ag::Leaf(p0);
    r = testing::CheckGradients([&] { return CeLossOp(p, y); }, {p});
    CHECK(r.max_rel_error <= 1e-3);
  }
}

TEST_CASE("alpha schedule branches") {
  CHECK(AlphaSchedule(5, 0, 100, 0.1, 0.9, 0.8) == 0.0);
  CHECK(AlphaSchedule(10, 0, 100, 0.1, 0.9, 0.8) == 0.0);
  CHECK(AlphaSchedule(50, 0, 100, 0.1, 0.9, 0.8) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(AlphaSchedule(50, 3, 100, 0.1, 0.9, 0.8) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(AlphaSchedule(90, 0, 100, 0.1, 0.9, 0.8) == doctest::Approx(0.72).epsilon(1e-15));
  CHECK(AlphaSchedule(95, 0, 100, 0.1, 0.9, 0.8) == 1.0);
  CHECK_THROWS(AlphaSchedule(0, 0, 100, 0.1, 0.9, 0.8));
  CHECK_THROWS(AlphaSchedule(101, 0, 100, 0.1, 0.9, 0.8));
  for (int t = 0; t < 5; ++t) {
    for (int b = 1; b <= 40; ++b) {
      const double a = AlphaSchedule(b, t, 40, 0.1, 0.9, 0.8);
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }
}

TEST_CASE("pseudo labels and unlabeled loss") {
  Tensor probs(1, 2, {0.9, 0.1});
  CHECK(PseudoLabels(probs) == std::vector<int>{0});
  CHECK(PseudoLabelLoss(probs) == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK(PseudoLabel(0.5, 0.5) == 0);
  Tensor confident(2, 2, {1e-15, 1.0, 1.0, 1e-15});
  CHECK(PseudoLabelLoss(confident) < 1e-10);
}

TEST_CASE("supervised and total loss arithmetic with ablation switches") {
  CHECK(SupervisedLoss(1.0, 2.0, 0.0) == 1.0);
  CHECK(SupervisedLoss(1.0, 2.0, 1.0) == 2.0);
  CHECK(SupervisedLoss(1.0, 2.0, 0.2) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(TotalLoss(1.2, 0.5, 0.4) == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(TotalLoss(1.2, 0.5, 0.0) == 1.2);
  ModelConfig c;
  CHECK(EffectiveLambda(c) == 0.2);
  CHECK(EffectiveAlpha(c, 50, 0, 100) == doctest::Approx(0.4));
  c.use_scl = false;
  c.use_ssl = false;
  CHECK(EffectiveLambda(c) == 0.0);
  CHECK(EffectiveAlpha(c, 95, 0, 100) == 0.0);
  CHECK(TotalLoss(SupervisedLoss(0.7, 3.0, EffectiveLambda(c)), 9.0, EffectiveAlpha(c, 95, 0, 100)) ==
        0.7);
}

}  // namespace
}  // namespace cosmos::losses
