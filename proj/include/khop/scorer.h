#ifndef KHOP_SCORER_H_
#define KHOP_SCORER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "khop/sample.h"
#include "khop/templates.h"

namespace khop {

// Lowercased whitespace-delimited words; trailing sentence punctuation
// (. , ; : ! ?) is split off into its own token.
class TokenSequence {
 public:
  TokenSequence() = default;
  // Throws std::invalid_argument on an empty token.
  explicit TokenSequence(std::vector<std::string> tokens);

  static TokenSequence tokenize(std::string_view text);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
};

// Log conditional probability of token j given every other token.
class MaskedScorer {
 public:
  virtual ~MaskedScorer() = default;
  virtual double log_prob(const TokenSequence& seq, std::size_t j) const = 0;
};

class UniformScorer final : public MaskedScorer {
 public:
  explicit UniformScorer(double vocab_size);
  double log_prob(const TokenSequence& seq, std::size_t j) const override;

 private:
  double log_p_;
};

// Laplace-smoothed bigram model. The masked conditional at position j is
//   P(w | prev, next) = P(w | prev) P(next | w) / sum_v P(v | prev) P(next | v)
// with <s> and </s> padding and an <unk> bucket for unseen words.
class BigramScorer final : public MaskedScorer {
 public:
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";
  static constexpr std::string_view kUnk = "<unk>";

  // Counts bigrams over the given sentences.
  static BigramScorer train(const std::vector<TokenSequence>& corpus);
  // Counts file: "token \t token \t count" lines, as written by save().
  static BigramScorer load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  double log_prob(const TokenSequence& seq, std::size_t j) const override;

  // Smoothed P(next | prev) over the vocabulary.
  double bigram(std::string_view prev, std::string_view next) const;
  // Size of the successor domain: every seen token plus </s> and <unk>.
  std::size_t vocab_size() const { return static_cast<std::size_t>(vocab_); }

 private:
  using Id = std::uint32_t;
  using CountTable = std::map<std::pair<std::string, std::string>, std::uint64_t>;

  explicit BigramScorer(const CountTable& counts);
  Id id(std::string_view token) const;  // <unk> for anything unseen
  std::uint64_t count(Id a, Id b) const;
  double bigram_id(Id prev, Id next) const;

  CountTable raw_;
  std::vector<std::string> tokens_;  // sorted; includes <s>, </s>, <unk>
  std::unordered_map<std::string, Id> index_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::vector<std::vector<std::pair<Id, std::uint64_t>>> successors_;
  std::vector<std::vector<std::pair<Id, std::uint64_t>>> predecessors_;
  std::vector<std::uint64_t> totals_;
  double vocab_ = 0;       // |successor domain| = tokens minus <s>
  double base_mass_ = 0;   // sum over candidates v of 1 / (C(v) + V)
  Id bos_ = 0, eos_ = 0, unk_ = 0;
};

// S = -(1/m) sum_j log P(t_j | rest). Throws std::invalid_argument on m = 0.
double pll_score(const MaskedScorer& scorer, const TokenSequence& seq);

// Synthetic questions: every mask occurrence becomes the answer. Questions
// without a mask (benchmark items) get the answer appended after a space.
std::string candidate_text(const QASample& sample, std::size_t answer_index,
                           const MaskToken& mask = {});
TokenSequence build_candidate_sequence(const QASample& sample, std::size_t answer_index,
                                       const MaskToken& mask = {});

struct Selection {
  std::size_t index = 0;
  std::vector<double> scores;
};

// Lowest score wins; ties go to the lowest index.
Selection select_answer(const MaskedScorer& scorer, const QASample& sample,
                        const MaskToken& mask = {});
std::size_t argmin(const std::vector<double>& scores);

}  // namespace khop

#endif  // KHOP_SCORER_H_
