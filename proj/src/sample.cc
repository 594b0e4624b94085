#include "khop/sample.h"

#include <stdexcept>
#include <string>

namespace khop {

std::string_view to_string(SampleKind kind) {
  switch (kind) {
    case SampleKind::kCompositive:
      return "compositive";
    case SampleKind::kConjunctive:
      return "conjunctive";
    case SampleKind::kSingleHop:
      return "single_hop";
    case SampleKind::kBenchmark:
      return "benchmark";
  }
  return "unknown";
}

SampleKind parse_sample_kind(std::string_view name) {
  for (auto k : {SampleKind::kCompositive, SampleKind::kConjunctive, SampleKind::kSingleHop,
                 SampleKind::kBenchmark}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown sample kind: " + std::string(name));
}

}  // namespace khop
