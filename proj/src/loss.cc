#include "khop/loss.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace khop {

void LossConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("temperature must be a positive finite number");
  }
}

void ScoredBatch::validate() const {
  if (negatives.empty()) throw std::invalid_argument("batch needs at least one negative");
  if (!std::isfinite(positive) ||
      !std::all_of(negatives.begin(), negatives.end(), [](double s) { return std::isfinite(s); })) {
    throw std::invalid_argument("batch scores must be finite");
  }
}

ScoredBatch ScoredBatch::from_scores(std::span<const double> scores, std::size_t positive_index) {
  if (positive_index >= scores.size()) throw std::invalid_argument("positive index out of range");
  ScoredBatch b;
  b.positive = scores[positive_index];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i != positive_index) b.negatives.push_back(scores[i]);
  }
  return b;
}

namespace {

// Logits -s/tau, positive first, and their max.
std::vector<double> logits(const ScoredBatch& batch, const LossConfig& config, double& max) {
  config.validate();
  batch.validate();
  std::vector<double> z;
  z.reserve(batch.negatives.size() + 1);
  z.push_back(-batch.positive / config.tau);
  for (double s : batch.negatives) z.push_back(-s / config.tau);
  max = *std::max_element(z.begin(), z.end());
  return z;
}

}  // namespace

std::vector<double> normalized_probs(const ScoredBatch& batch, const LossConfig& config) {
  double max = 0;
  std::vector<double> p = logits(batch, config, max);
  double sum = 0.0;
  for (double& v : p) sum += (v = std::exp(v - max));
  for (double& v : p) v /= sum;
  return p;
}

double infonce(const ScoredBatch& batch, const LossConfig& config) {
  double max = 0;
  const std::vector<double> z = logits(batch, config, max);
  // With the positive on top, log1p keeps tiny losses distinct instead of
  // rounding log(1 + x) to zero.
  if (z.front() == max) {
    double rest = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) rest += std::exp(z[i] - max);
    return std::log1p(rest);
  }
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - max);
  return (max - z.front()) + std::log(sum);
}

double mean_loss(std::span<const ScoredBatch> batches, const LossConfig& config) {
  if (batches.empty()) throw std::invalid_argument("mean_loss of an empty batch stream");
  double sum = 0.0;
  for (const auto& b : batches) sum += infonce(b, config);
  return sum / static_cast<double>(batches.size());
}

}  // namespace khop
