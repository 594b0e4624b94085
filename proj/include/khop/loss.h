#ifndef KHOP_LOSS_H_
#define KHOP_LOSS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace khop {

inline constexpr double kDefaultTemperature = 0.7;

struct LossConfig {
  double tau = kDefaultTemperature;
  // Throws std::invalid_argument unless tau > 0 and finite.
  void validate() const;
};

// One positive candidate score and n >= 1 negative scores (lower is better).
struct ScoredBatch {
  double positive = 0.0;
  std::vector<double> negatives;

  // Throws std::invalid_argument on no negatives or a non-finite score.
  void validate() const;
  // Reorders per-candidate scores into positive-first layout.
  static ScoredBatch from_scores(std::span<const double> scores, std::size_t positive_index);
};

// softmax(-score / tau), positive first.
std::vector<double> normalized_probs(const ScoredBatch& batch, const LossConfig& config = {});

// -log softmax(-score / tau)[positive], computed with max subtraction.
double infonce(const ScoredBatch& batch, const LossConfig& config = {});

// Arithmetic mean of per-batch InfoNCE. Throws on an empty input.
double mean_loss(std::span<const ScoredBatch> batches, const LossConfig& config = {});

}  // namespace khop

#endif  // KHOP_LOSS_H_
