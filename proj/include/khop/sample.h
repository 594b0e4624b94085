#ifndef KHOP_SAMPLE_H_
#define KHOP_SAMPLE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace khop {

enum class SampleKind { kCompositive, kConjunctive, kSingleHop, kBenchmark };

std::string_view to_string(SampleKind kind);
// Throws std::invalid_argument on an unknown name.
SampleKind parse_sample_kind(std::string_view name);

struct ProvenanceTriple {
  std::string head;
  std::string relation;
  std::string tail;

  bool operator==(const ProvenanceTriple&) const = default;
};

// One multiple-choice question. Synthetic questions carry the mask token in
// place of the answer; benchmark questions are free text.
struct QASample {
  std::string id;
  std::string question;
  std::vector<std::string> answers;
  std::size_t correct_index = 0;
  SampleKind kind = SampleKind::kSingleHop;
  std::vector<ProvenanceTriple> provenance;

  const std::string& correct_answer() const { return answers.at(correct_index); }
  bool operator==(const QASample&) const = default;
};

}  // namespace khop

#endif  // KHOP_SAMPLE_H_
