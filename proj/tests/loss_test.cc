#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "khop/loss.h"

using namespace khop;

namespace {

// Loss evaluated directly in long double: -log(exp(-p/t) / sum exp(-s_i/t)).
long double reference_loss(const ScoredBatch& b, long double tau) {
  long double denom = std::exp(-static_cast<long double>(b.positive) / tau);
  const long double numer = denom;
  for (double s : b.negatives) denom += std::exp(-static_cast<long double>(s) / tau);
  return -std::log(numer / denom);
}

ScoredBatch random_batch(std::mt19937_64& rng, std::size_t n = 2, double scale = 5.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  ScoredBatch b;
  b.positive = u(rng);
  for (std::size_t i = 0; i < n; ++i) b.negatives.push_back(u(rng));
  return b;
}

}  // namespace

TEST_CASE("defaults") {
  CHECK(LossConfig{}.tau == 0.7);
  CHECK_THROWS_AS(LossConfig{0.0}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(LossConfig{-1.0}.validate(), std::invalid_argument);
}

TEST_CASE("normalized probabilities") {
  const ScoredBatch equal{2.0, {2.0, 2.0}};
  for (double p : normalized_probs(equal)) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const ScoredBatch distinct{1.0, {2.0, 3.0}};
  for (double p : normalized_probs(distinct, {1e6})) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-4));

  // Frozen from a 40-digit evaluation.
  CHECK(normalized_probs(distinct)[0] == doctest::Approx(0.77096029666111709).epsilon(1e-14));

  std::mt19937_64 rng(9);
  for (int i = 0; i < 10000; ++i) {
    const auto probs = normalized_probs(random_batch(rng, 1 + rng() % 6, 50.0));
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (double p : probs) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("infonce values") {
  CHECK(infonce({2.0, {2.0, 2.0}}) == doctest::Approx(1.0986122886681097).epsilon(1e-15));
  CHECK(infonce({1.0, {2.0, 3.0}}) == doctest::Approx(0.26011840264474478).epsilon(1e-14));
  // Large scores do not overflow.
  const double big = infonce({5000.0, {5001.0, 5002.0}}, {0.01});
  CHECK(std::isfinite(big));
  CHECK(big >= 0.0);
  // A dominant positive leaves a tiny but nonzero loss that still orders.
  const double tiny = infonce({-20.0, {20.0, 19.0}});
  CHECK(tiny > 0.0);
  CHECK(tiny == doctest::Approx(std::exp(-40.0 / 0.7) + std::exp(-39.0 / 0.7)).epsilon(1e-12));
  CHECK(infonce({-19.9, {20.0, 19.0}}) > tiny);
}

TEST_CASE("infonce properties") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    auto b = random_batch(rng, 2);
    const double base = infonce(b);
    CHECK(base >= 0.0);
    CHECK(base == doctest::Approx(static_cast<double>(reference_loss(b, 0.7L))).epsilon(1e-12));

    auto moved = b;
    const double c = shift(rng);
    moved.positive += c;
    for (double& s : moved.negatives) s += c;
    CHECK(std::abs(infonce(moved) - base) <= 1e-9);

    auto better = b;
    better.positive -= 0.01 + std::abs(shift(rng)) / 100.0;
    CHECK(infonce(better) < base);
  }
}

TEST_CASE("invalid batches") {
  CHECK_THROWS_AS(infonce({1.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(infonce({NAN, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(normalized_probs({1.0, {INFINITY}}), std::invalid_argument);
}

TEST_CASE("from_scores puts the positive first") {
  const double scores[] = {3.0, 1.0, 2.0};
  const auto b = ScoredBatch::from_scores(scores, 1);
  CHECK(b.positive == 1.0);
  CHECK(b.negatives == std::vector<double>{3.0, 2.0});
}

TEST_CASE("mean loss") {
  const ScoredBatch a{1.0, {2.0, 3.0}};
  const ScoredBatch b{2.0, {2.0, 2.0}};
  CHECK(mean_loss(std::vector{a}) == infonce(a));
  CHECK(mean_loss(std::vector{a, b}) == doctest::Approx((infonce(a) + infonce(b)) / 2).epsilon(1e-15));
  CHECK_THROWS_AS(mean_loss(std::vector<ScoredBatch>{}), std::invalid_argument);

  std::mt19937_64 rng(4);
  std::vector<ScoredBatch> batches;
  for (int i = 0; i < 100; ++i) batches.push_back(random_batch(rng, 2));
  long double sum = 0;
  for (const auto& x : batches) sum += reference_loss(x, 0.7L);
  CHECK(std::abs(mean_loss(batches) - static_cast<double>(sum / 100)) <= 1e-10);
}
