#include "khop/generate.h"

#include <algorithm>
#include <atomic>
#include <functional>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "khop/util.h"

namespace khop {

void GenConfig::validate() const {
  if (n_distractors == 0) throw std::invalid_argument("n_distractors must be >= 1");
  if (max_samples_per_key && *max_samples_per_key == 0) {
    throw std::invalid_argument("max_samples_per_key must be >= 1");
  }
}

KindStats& KindStats::operator+=(const KindStats& o) {
  candidates += o.candidates;
  emitted += o.emitted;
  too_few_distractors += o.too_few_distractors;
  answer_leak += o.answer_leak;
  capped += o.capped;
  return *this;
}

std::vector<EntityId> compositive_distractors(const KnowledgeGraph& kg,
                                              const CompositivePath& path) {
  std::vector<EntityId> out;
  for (EntityId e3 : kg.outgoing(path.head, path.r1)) {
    if (e3 == path.key || e3 == path.head) continue;
    if (kg.contains(e3, path.r2, path.tail)) continue;
    out.push_back(e3);
  }
  return out;
}

std::vector<EntityId> conjunctive_distractors(const KnowledgeGraph& kg,
                                              const ConjunctivePair& pair) {
  auto a = kg.incoming(pair.t1, pair.r1);
  auto b = kg.incoming(pair.t2, pair.r2);
  std::vector<EntityId> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  std::erase(out, pair.key);
  return out;
}

namespace {

// Draws n distinct items from the sorted pool at(0..size) that are not in
// `excluded` (sorted, unique, every element present in the pool). Empty when
// fewer than n are eligible.
template <class At>
std::vector<EntityId> draw_excluding(std::size_t size, At at,
                                     std::span<const EntityId> excluded, std::size_t n,
                                     Rng& rng) {
  auto is_excluded = [&](EntityId e) {
    return std::binary_search(excluded.begin(), excluded.end(), e);
  };
  const std::size_t blocked = excluded.size();
  if (size < blocked + n) return {};

  std::vector<EntityId> out;
  out.reserve(n);
  if (size - blocked <= 4 * n) {
    std::vector<EntityId> eligible;
    for (std::size_t i = 0; i < size; ++i) {
      if (!is_excluded(at(i))) eligible.push_back(at(i));
    }
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(eligible[k], eligible[k + uniform_index(rng, eligible.size() - k)]);
      out.push_back(eligible[k]);
    }
    return out;
  }
  // At least 3/4 of the pool is eligible, so rejection terminates quickly.
  while (out.size() < n) {
    const EntityId e = at(uniform_index(rng, size));
    if (is_excluded(e) || std::find(out.begin(), out.end(), e) != out.end()) continue;
    out.push_back(e);
  }
  return out;
}

std::vector<EntityId> sorted_unique(std::vector<EntityId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

ProvenanceTriple provenance(const KnowledgeGraph& kg, EntityId h, RelationId r, EntityId t) {
  return {kg.surface(h), kg.relation_name(r), kg.surface(t)};
}

std::string sample_id(SampleKind kind, const std::vector<ProvenanceTriple>& prov) {
  Fnv1a h;
  h.add(to_string(kind));
  for (const auto& p : prov) {
    h.add("\n").add(p.head).add("\t").add(p.relation).add("\t").add(p.tail);
  }
  return hex64(h.digest());
}

std::uint64_t sample_seed(std::uint64_t seed, const std::string& id) {
  return splitmix64(seed ^ splitmix64(Fnv1a().add(id).digest()));
}

std::uint64_t key_seed(std::uint64_t seed, SampleKind kind, EntityId key) {
  return splitmix64(splitmix64(seed + static_cast<std::uint64_t>(kind) + 1) ^ key.value);
}

// Picks n of the eligible distractors and places the answer at a seeded slot.
QASample assemble(const KnowledgeGraph& kg, SampleKind kind, std::string question,
                  EntityId answer, std::vector<EntityId> pool, std::size_t n,
                  std::vector<ProvenanceTriple> prov, Rng& rng) {
  QASample s;
  s.kind = kind;
  s.question = std::move(question);
  s.provenance = std::move(prov);
  s.id = sample_id(kind, s.provenance);
  for (std::size_t k = 0; k < n; ++k) {
    std::swap(pool[k], pool[k + uniform_index(rng, pool.size() - k)]);
    s.answers.push_back(kg.surface(pool[k]));
  }
  s.correct_index = uniform_index(rng, n + 1);
  s.answers.insert(s.answers.begin() + static_cast<std::ptrdiff_t>(s.correct_index),
                   kg.surface(answer));
  return s;
}

struct KeyOutput {
  std::vector<QASample> samples;
  KindStats stats;
};

// Runs `try_build(index)` over [0, count). With a cap, indices are visited in
// a seeded random order (lazy Fisher-Yates) until `cap` samples succeed, and
// the survivors are emitted in index order; that is a uniform choice among
// the valid candidates.
void emit_for_key(std::uint64_t count, std::optional<std::size_t> cap, std::uint64_t seed,
                  const std::function<std::optional<QASample>(std::uint64_t)>& try_build,
                  KeyOutput& out) {
  if (!cap || count <= *cap) {
    for (std::uint64_t i = 0; i < count; ++i) {
      if (auto s = try_build(i)) out.samples.push_back(std::move(*s));
    }
    return;
  }
  Rng rng(seed);
  std::unordered_map<std::uint64_t, std::uint64_t> moved;
  auto slot = [&](std::uint64_t i) {
    auto it = moved.find(i);
    return it == moved.end() ? i : it->second;
  };
  std::vector<std::pair<std::uint64_t, QASample>> chosen;
  std::uint64_t k = 0;
  for (; k < count && chosen.size() < *cap; ++k) {
    const std::uint64_t j = k + uniform_index(rng, count - k);
    const std::uint64_t pick = slot(j);
    moved[j] = slot(k);
    if (auto s = try_build(pick)) chosen.emplace_back(pick, std::move(*s));
  }
  out.stats.capped += count - k;
  std::sort(chosen.begin(), chosen.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [index, s] : chosen) out.samples.push_back(std::move(s));
}

// Splits [0, n_keys) into chunks processed by KHOP_THREADS workers and
// concatenates the per-chunk output in key order.
GenResult run_keys(std::size_t n_keys, const std::function<void(std::uint32_t, KeyOutput&)>& fn,
                   KindStats GenStats::*slot) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n_keys, 1));
  const std::size_t n_chunks = std::max<std::size_t>(1, std::min<std::size_t>(n_keys, workers * 8));
  std::vector<KeyOutput> chunks(n_chunks);
  auto chunk_range = [&](std::size_t c) {
    return std::pair(n_keys * c / n_chunks, n_keys * (c + 1) / n_chunks);
  };
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < n_chunks;) {
      auto [lo, hi] = chunk_range(c);
      for (std::size_t key = lo; key < hi; ++key) fn(static_cast<std::uint32_t>(key), chunks[c]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  GenResult result;
  KindStats& stats = result.stats.*slot;
  for (auto& c : chunks) {
    stats += c.stats;
    stats.emitted += c.samples.size();
    std::move(c.samples.begin(), c.samples.end(), std::back_inserter(result.samples));
  }
  return result;
}

}  // namespace

std::vector<EntityId> random_distractors(const KnowledgeGraph& kg, std::size_t n,
                                         std::span<const EntityId> excluded,
                                         std::uint64_t seed) {
  auto blocked = sorted_unique({excluded.begin(), excluded.end()});
  std::erase_if(blocked, [&](EntityId e) { return e.value >= kg.entity_count(); });
  Rng rng(seed);
  const std::size_t eligible = kg.entity_count() - blocked.size();
  return draw_excluding(
      kg.entity_count(), [](std::size_t i) { return EntityId{static_cast<std::uint32_t>(i)}; },
      blocked, std::min(n, eligible), rng);
}

GenResult gen_compositive(const KnowledgeGraph& kg, const TemplateTable& table,
                          const GenConfig& config) {
  config.validate();
  validate_mask(config.mask, kg);
  const std::size_t n = config.n_distractors;
  return run_keys(
      kg.entity_count(),
      [&](std::uint32_t key_value, KeyOutput& out) {
        const EntityId key{key_value};
        const EdgeList in = kg.in_edges(key);
        const EdgeList outs = kg.out_edges(key);
        if (in.size() == 0 || outs.size() == 0) return;
        auto try_build = [&](std::uint64_t index) -> std::optional<QASample> {
          const CompositivePath path{in.others[index / outs.size()], in.rels[index / outs.size()],
                                     key, outs.rels[index % outs.size()],
                                     outs.others[index % outs.size()]};
          if (path.head == key || path.tail == key || path.tail == path.head) return std::nullopt;
          ++out.stats.candidates;
          const Triple first{path.head, path.r1, key};
          const Triple second{key, path.r2, path.tail};
          std::string question = render_masked(kg, first, key, table, config.mask) + " " +
                                 render_masked(kg, second, key, table, config.mask);
          if (mentions_phrase(question, kg.surface(key))) {
            ++out.stats.answer_leak;
            return std::nullopt;
          }
          std::vector<ProvenanceTriple> prov{provenance(kg, path.head, path.r1, key),
                                             provenance(kg, key, path.r2, path.tail)};
          Rng rng(sample_seed(config.seed, sample_id(SampleKind::kCompositive, prov)));
          std::vector<EntityId> pool;
          if (config.hard_negatives) {
            pool = compositive_distractors(kg, path);
          } else {
            const EntityId excluded[] = {key, path.head, path.tail};
            pool = random_distractors(kg, n, excluded, rng());
          }
          if (pool.size() < n) {
            ++out.stats.too_few_distractors;
            return std::nullopt;
          }
          return assemble(kg, SampleKind::kCompositive, std::move(question), key,
                          std::move(pool), n, std::move(prov), rng);
        };
        emit_for_key(std::uint64_t{in.size()} * outs.size(), config.max_samples_per_key,
                     key_seed(config.seed, SampleKind::kCompositive, key), try_build, out);
      },
      &GenStats::compositive);
}

GenResult gen_conjunctive(const KnowledgeGraph& kg, const TemplateTable& table,
                          const GenConfig& config) {
  config.validate();
  validate_mask(config.mask, kg);
  const std::size_t n = config.n_distractors;
  return run_keys(
      kg.entity_count(),
      [&](std::uint32_t key_value, KeyOutput& out) {
        const EntityId key{key_value};
        const EdgeList outs = kg.out_edges(key);
        const std::uint64_t m = outs.size();
        if (m < 2) return;
        auto try_build = [&](std::uint64_t index) -> std::optional<QASample> {
          const std::uint64_t i = index / m, j = index % m;
          if (i >= j) return std::nullopt;
          const ConjunctivePair pair{key, outs.rels[i], outs.others[i], outs.rels[j],
                                     outs.others[j]};
          if (pair.t1 == pair.t2 || pair.t1 == key || pair.t2 == key) return std::nullopt;
          ++out.stats.candidates;
          const Triple first{key, pair.r1, pair.t1};
          const Triple second{key, pair.r2, pair.t2};
          std::string question = render_masked(kg, first, key, table, config.mask) + " " +
                                 render_masked(kg, second, key, table, config.mask);
          if (mentions_phrase(question, kg.surface(key))) {
            ++out.stats.answer_leak;
            return std::nullopt;
          }
          std::vector<ProvenanceTriple> prov{provenance(kg, key, pair.r1, pair.t1),
                                             provenance(kg, key, pair.r2, pair.t2)};
          Rng rng(sample_seed(config.seed, sample_id(SampleKind::kConjunctive, prov)));
          std::vector<EntityId> pool;
          if (config.hard_negatives) {
            pool = conjunctive_distractors(kg, pair);
          } else {
            const EntityId excluded[] = {key, pair.t1, pair.t2};
            pool = random_distractors(kg, n, excluded, rng());
          }
          if (pool.size() < n) {
            ++out.stats.too_few_distractors;
            return std::nullopt;
          }
          return assemble(kg, SampleKind::kConjunctive, std::move(question), key,
                          std::move(pool), n, std::move(prov), rng);
        };
        emit_for_key(m * m, config.max_samples_per_key,
                     key_seed(config.seed, SampleKind::kConjunctive, key), try_build, out);
      },
      &GenStats::conjunctive);
}

GenResult gen_single_hop(const KnowledgeGraph& kg, const TemplateTable& table,
                         const GenConfig& config) {
  config.validate();
  validate_mask(config.mask, kg);
  const std::size_t n = config.n_distractors;

  std::vector<EntityId> tails;
  for (std::uint32_t e = 0; e < kg.entity_count(); ++e) {
    if (kg.in_edges(EntityId{e}).size() > 0) tails.push_back(EntityId{e});
  }
  // Keyed by head so the output stays in (head, rel, tail) order.
  return run_keys(
      kg.entity_count(),
      [&](std::uint32_t head_value, KeyOutput& out) {
        const EntityId head{head_value};
        const EdgeList outs = kg.out_edges(head);
        for (std::size_t i = 0; i < outs.size(); ++i) {
          const Triple t{head, outs.rels[i], outs.others[i]};
          if (t.tail == t.head) continue;
          ++out.stats.candidates;
          std::string question = render_masked(kg, t, t.tail, table, config.mask);
          if (mentions_phrase(question, kg.surface(t.tail))) {
            ++out.stats.answer_leak;
            continue;
          }
          std::vector<ProvenanceTriple> prov{provenance(kg, t.head, t.rel, t.tail)};
          Rng rng(sample_seed(config.seed, sample_id(SampleKind::kSingleHop, prov)));
          // Other true tails of (head, rel) would be correct answers too.
          auto siblings = kg.outgoing(t.head, t.rel);
          std::vector<EntityId> excluded(siblings.begin(), siblings.end());
          if (std::binary_search(tails.begin(), tails.end(), t.head)) excluded.push_back(t.head);
          excluded = sorted_unique(std::move(excluded));
          auto pool = draw_excluding(
              tails.size(), [&](std::size_t k) { return tails[k]; }, excluded, n, rng);
          if (pool.size() < n) {
            ++out.stats.too_few_distractors;
            continue;
          }
          out.samples.push_back(assemble(kg, SampleKind::kSingleHop, std::move(question),
                                         t.tail, std::move(pool), n, std::move(prov), rng));
        }
      },
      &GenStats::single_hop);
}

GenResult generate(const KnowledgeGraph& kg, const TemplateTable& table,
                   const GenConfig& config) {
  config.validate();
  GenResult all;
  auto append = [&](GenResult part) {
    std::move(part.samples.begin(), part.samples.end(), std::back_inserter(all.samples));
    all.stats.compositive += part.stats.compositive;
    all.stats.conjunctive += part.stats.conjunctive;
    all.stats.single_hop += part.stats.single_hop;
  };
  if (config.enable_compositive) append(gen_compositive(kg, table, config));
  if (config.enable_conjunctive) append(gen_conjunctive(kg, table, config));
  if (config.enable_single_hop) append(gen_single_hop(kg, table, config));
  return all;
}

}  // namespace khop
