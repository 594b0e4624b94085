#ifndef KHOP_GENERATE_H_
#define KHOP_GENERATE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "khop/graph.h"
#include "khop/sample.h"
#include "khop/templates.h"

namespace khop {

struct GenConfig {
  std::size_t n_distractors = 2;
  std::uint64_t seed = 0;
  // nullopt disables the per-key cap.
  std::optional<std::size_t> max_samples_per_key = 10;
  // false swaps the constrained distractors for seeded random entities.
  bool hard_negatives = true;
  bool enable_compositive = true;
  bool enable_conjunctive = true;
  bool enable_single_hop = true;
  MaskToken mask;

  // Throws std::invalid_argument on n_distractors == 0 or a zero cap.
  void validate() const;
};

struct KindStats {
  std::size_t candidates = 0;    // paths / pairs / triples examined
  std::size_t emitted = 0;
  std::size_t too_few_distractors = 0;
  std::size_t answer_leak = 0;   // answer would be readable in the question
  std::size_t capped = 0;        // valid but dropped by max_samples_per_key

  KindStats& operator+=(const KindStats& o);
};

struct GenStats {
  KindStats compositive;
  KindStats conjunctive;
  KindStats single_hop;
};

struct GenResult {
  std::vector<QASample> samples;
  GenStats stats;
};

// (e1h, r1, ekey) followed by (ekey, r2, e2t).
struct CompositivePath {
  EntityId head;
  RelationId r1;
  EntityId key;
  RelationId r2;
  EntityId tail;
};

// (ekey, r1, t1) and (ekey, r2, t2) with (r1, t1) < (r2, t2).
struct ConjunctivePair {
  EntityId key;
  RelationId r1;
  EntityId t1;
  RelationId r2;
  EntityId t2;
};

// Entities e3 with (head, r1, e3), e3 != key, e3 != head and no (e3, r2, tail).
// Ascending by handle.
std::vector<EntityId> compositive_distractors(const KnowledgeGraph& kg,
                                              const CompositivePath& path);

// Entities e3 != key for which exactly one of (e3, r1, t1) and (e3, r2, t2)
// holds. Ascending by handle.
std::vector<EntityId> conjunctive_distractors(const KnowledgeGraph& kg,
                                              const ConjunctivePair& pair);

// Up to n distinct entities drawn uniformly from the graph, none of them in
// `excluded`. Returns fewer only when the graph has fewer eligible entities.
std::vector<EntityId> random_distractors(const KnowledgeGraph& kg, std::size_t n,
                                         std::span<const EntityId> excluded,
                                         std::uint64_t seed);

// Each generator emits in ascending key order and is a pure function of
// (graph, table, config). The mask token is validated against the graph first.
GenResult gen_compositive(const KnowledgeGraph& kg, const TemplateTable& table,
                          const GenConfig& config);
GenResult gen_conjunctive(const KnowledgeGraph& kg, const TemplateTable& table,
                          const GenConfig& config);
GenResult gen_single_hop(const KnowledgeGraph& kg, const TemplateTable& table,
                         const GenConfig& config);

// Runs the enabled generators: compositive, then conjunctive, then single-hop.
GenResult generate(const KnowledgeGraph& kg, const TemplateTable& table,
                   const GenConfig& config);

}  // namespace khop

#endif  // KHOP_GENERATE_H_
