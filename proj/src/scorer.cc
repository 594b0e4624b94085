#include "khop/scorer.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace khop {

TokenSequence::TokenSequence(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) {
    if (t.empty()) throw std::invalid_argument("empty token in sequence");
  }
}

namespace {

bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

}  // namespace

TokenSequence TokenSequence::tokenize(std::string_view text) {
  TokenSequence seq;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    std::string_view word = text.substr(i, j - i);
    std::size_t core = word.size();
    while (core > 0 && is_trailing_punct(word[core - 1])) --core;
    if (core > 0) {
      std::string w(word.substr(0, core));
      for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      seq.tokens_.push_back(std::move(w));
    }
    for (std::size_t k = core; k < word.size(); ++k) seq.tokens_.emplace_back(1, word[k]);
    i = j;
  }
  return seq;
}

UniformScorer::UniformScorer(double vocab_size) {
  if (!(vocab_size >= 1.0)) throw std::invalid_argument("vocab size must be >= 1");
  log_p_ = -std::log(vocab_size);
}

double UniformScorer::log_prob(const TokenSequence&, std::size_t) const { return log_p_; }

BigramScorer::BigramScorer(const CountTable& counts) : raw_(counts) {
  std::vector<std::string> tokens{std::string(kBos), std::string(kEos), std::string(kUnk)};
  for (const auto& [pair, c] : counts) {
    tokens.push_back(pair.first);
    tokens.push_back(pair.second);
  }
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  tokens_ = std::move(tokens);
  for (Id i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
  bos_ = index_.at(std::string(kBos));
  eos_ = index_.at(std::string(kEos));
  unk_ = index_.at(std::string(kUnk));

  const std::size_t n = tokens_.size();
  successors_.resize(n);
  predecessors_.resize(n);
  totals_.assign(n, 0);
  for (const auto& [pair, c] : counts) {
    const Id a = index_.at(pair.first), b = index_.at(pair.second);
    counts_[(std::uint64_t{a} << 32) | b] += c;
    successors_[a].emplace_back(b, c);
    predecessors_[b].emplace_back(a, c);
    totals_[a] += c;
  }
  vocab_ = static_cast<double>(n - 1);
  for (Id v = 0; v < n; ++v) {
    if (v == bos_ || v == eos_) continue;
    base_mass_ += 1.0 / (static_cast<double>(totals_[v]) + vocab_);
  }
}

BigramScorer BigramScorer::train(const std::vector<TokenSequence>& corpus) {
  CountTable counts;
  for (const auto& seq : corpus) {
    std::string_view prev = kBos;
    for (const auto& tok : seq.tokens()) {
      ++counts[{std::string(prev), tok}];
      prev = tok;
    }
    if (!seq.empty()) ++counts[{std::string(prev), std::string(kEos)}];
  }
  return BigramScorer(counts);
}

BigramScorer BigramScorer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bigram counts " + path.string());
  CountTable counts;
  std::string line;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    std::uint64_t c = 0;
    const char* begin = t2 == std::string::npos ? nullptr : line.data() + t2 + 1;
    if (t1 == 0 || t2 == std::string::npos || t2 == t1 + 1 ||
        std::from_chars(begin, line.data() + line.size(), c).ptr != line.data() + line.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(row) +
                               ": expected 'token<TAB>token<TAB>count'");
    }
    counts[{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1)}] += c;
  }
  return BigramScorer(counts);
}

void BigramScorer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [pair, c] : raw_) out << pair.first << '\t' << pair.second << '\t' << c << '\n';
}

BigramScorer::Id BigramScorer::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end() || it->second == bos_ || it->second == eos_) return unk_;
  return it->second;
}

std::uint64_t BigramScorer::count(Id a, Id b) const {
  auto it = counts_.find((std::uint64_t{a} << 32) | b);
  return it == counts_.end() ? 0 : it->second;
}

double BigramScorer::bigram_id(Id prev, Id next) const {
  return (static_cast<double>(count(prev, next)) + 1.0) /
         (static_cast<double>(totals_[prev]) + vocab_);
}

double BigramScorer::bigram(std::string_view prev, std::string_view next) const {
  const Id a = prev == kBos ? bos_ : id(prev);
  const Id b = next == kEos ? eos_ : id(next);
  return bigram_id(a, b);
}

double BigramScorer::log_prob(const TokenSequence& seq, std::size_t j) const {
  if (j >= seq.size()) throw std::out_of_range("token index out of range");
  const Id prev = j == 0 ? bos_ : id(seq[j - 1]);
  const Id next = j + 1 == seq.size() ? eos_ : id(seq[j + 1]);
  const Id target = id(seq[j]);

  // sum_v (c(prev,v)+1)(c(v,next)+1)/(C(v)+V), expanded so only observed
  // bigrams are visited; the shared 1/(C(prev)+V) factor cancels.
  auto inv = [&](Id v) { return 1.0 / (static_cast<double>(totals_[v]) + vocab_); };
  double z = base_mass_;
  for (const auto& [v, c] : predecessors_[next]) {
    if (v != bos_) z += static_cast<double>(c) * inv(v);
  }
  for (const auto& [v, c] : successors_[prev]) {
    if (v == eos_) continue;
    z += static_cast<double>(c) * (static_cast<double>(count(v, next)) + 1.0) * inv(v);
  }
  const double numer = (static_cast<double>(count(prev, target)) + 1.0) *
                       (static_cast<double>(count(target, next)) + 1.0) * inv(target);
  return std::log(numer / z);
}

double pll_score(const MaskedScorer& scorer, const TokenSequence& seq) {
  if (seq.empty()) throw std::invalid_argument("cannot score an empty sequence");
  double sum = 0.0;
  for (std::size_t j = 0; j < seq.size(); ++j) sum += scorer.log_prob(seq, j);
  return -sum / static_cast<double>(seq.size());
}

std::string candidate_text(const QASample& sample, std::size_t answer_index,
                           const MaskToken& mask) {
  const std::string& answer = sample.answers.at(answer_index);
  const std::string& m = mask.text();
  if (sample.question.find(m) == std::string::npos) {
    return sample.question + " " + answer;
  }
  std::string out;
  std::size_t pos = 0;
  for (auto hit = sample.question.find(m); hit != std::string::npos;
       hit = sample.question.find(m, pos)) {
    out.append(sample.question, pos, hit - pos);
    out += answer;
    pos = hit + m.size();
  }
  out.append(sample.question, pos);
  return out;
}

TokenSequence build_candidate_sequence(const QASample& sample, std::size_t answer_index,
                                       const MaskToken& mask) {
  return TokenSequence::tokenize(candidate_text(sample, answer_index, mask));
}

std::size_t argmin(const std::vector<double>& scores) {
  return static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) -
                                  scores.begin());
}

Selection select_answer(const MaskedScorer& scorer, const QASample& sample,
                        const MaskToken& mask) {
  Selection sel;
  sel.scores.reserve(sample.answers.size());
  for (std::size_t i = 0; i < sample.answers.size(); ++i) {
    sel.scores.push_back(pll_score(scorer, build_candidate_sequence(sample, i, mask)));
  }
  sel.index = sel.scores.empty() ? 0 : argmin(sel.scores);
  return sel;
}

}  // namespace khop
