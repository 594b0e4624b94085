#include "khop/graph.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace khop {

std::string normalize_entity(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::uint32_t Interner::intern(std::string_view s) {
  if (auto it = ids_.find(s); it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(strings_.size());
  strings_.emplace_back(s);
  ids_.emplace(strings_.back(), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view s) const {
  if (auto it = ids_.find(s); it != ids_.end()) return it->second;
  return std::nullopt;
}

void Interner::reserve(std::size_t n) {
  ids_.reserve(n);
  strings_.reserve(n);
}

EntityId GraphBuilder::entity(std::string_view surface) {
  std::string norm = normalize_entity(surface);
  if (norm.empty()) {
    throw std::invalid_argument("entity surface is empty after normalization: '" +
                                std::string(surface) + "'");
  }
  return EntityId{entities_.intern(norm)};
}

RelationId GraphBuilder::relation(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("empty relation name");
  return RelationId{relations_.intern(name)};
}

void GraphBuilder::add(const Triple& triple) {
  if (!(triple.weight >= 0.0)) {
    throw std::invalid_argument("triple weight must be non-negative");
  }
  if (triple.head.value >= entities_.size() || triple.tail.value >= entities_.size() ||
      triple.rel.value >= relations_.size()) {
    throw std::invalid_argument("triple handle not issued by this builder");
  }
  rows_.push_back(triple);
}

void GraphBuilder::add(std::string_view head, std::string_view rel,
                       std::string_view tail, double weight) {
  add(Triple{entity(head), relation(rel), entity(tail), weight});
}

KnowledgeGraph GraphBuilder::build() && {
  return KnowledgeGraph::assemble(std::move(rows_), std::move(entities_),
                                  std::move(relations_));
}

KnowledgeGraph KnowledgeGraph::assemble(std::vector<Triple> rows, Interner entities,
                                        Interner relations) {
  KnowledgeGraph g;
  g.stats_.rows_added = rows.size();

  auto key = [](const Triple& t) {
    return std::tuple(t.head.value, t.rel.value, t.tail.value);
  };
  std::sort(rows.begin(), rows.end(),
            [&](const Triple& a, const Triple& b) { return key(a) < key(b); });
  // Collapse duplicate (h, r, t) keeping the max weight.
  std::size_t w = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (w > 0 && key(rows[w - 1]) == key(rows[i])) {
      rows[w - 1].weight = std::max(rows[w - 1].weight, rows[i].weight);
      continue;
    }
    rows[w++] = rows[i];
  }
  g.stats_.duplicates_collapsed = rows.size() - w;
  rows.resize(w);
  rows.shrink_to_fit();

  const std::size_t n_entities = entities.size();
  g.out_offsets_.assign(n_entities + 1, 0);
  g.in_offsets_.assign(n_entities + 1, 0);
  g.out_rel_.reserve(rows.size());
  g.out_tail_.reserve(rows.size());
  for (const Triple& t : rows) {
    ++g.out_offsets_[t.head.value + 1];
    ++g.in_offsets_[t.tail.value + 1];
    g.out_rel_.push_back(t.rel);
    g.out_tail_.push_back(t.tail);
  }
  for (std::size_t i = 0; i < n_entities; ++i) {
    g.out_offsets_[i + 1] += g.out_offsets_[i];
    g.in_offsets_[i + 1] += g.in_offsets_[i];
  }

  // Counting sort by tail. Rows are ordered by (head, rel), so a stable pass
  // leaves each tail bucket ordered by head; reorder to (rel, head) after.
  g.in_rel_.resize(rows.size());
  g.in_head_.resize(rows.size());
  std::vector<std::uint32_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (const Triple& t : rows) {
    const std::uint32_t pos = cursor[t.tail.value]++;
    g.in_rel_[pos] = t.rel;
    g.in_head_[pos] = t.head;
  }
  std::vector<std::pair<RelationId, EntityId>> bucket;
  for (std::size_t e = 0; e < n_entities; ++e) {
    const std::uint32_t lo = g.in_offsets_[e], hi = g.in_offsets_[e + 1];
    if (hi - lo < 2) continue;
    bucket.clear();
    for (std::uint32_t i = lo; i < hi; ++i) bucket.emplace_back(g.in_rel_[i], g.in_head_[i]);
    std::sort(bucket.begin(), bucket.end());
    for (std::uint32_t i = lo; i < hi; ++i) {
      g.in_rel_[i] = bucket[i - lo].first;
      g.in_head_[i] = bucket[i - lo].second;
    }
  }

  g.triples_ = std::move(rows);
  g.entities_ = std::move(entities);
  g.relations_ = std::move(relations);
  return g;
}

namespace {

std::pair<std::size_t, std::size_t> rel_range(std::span<const RelationId> rels,
                                              std::size_t base, RelationId r) {
  auto [lo, hi] = std::equal_range(rels.begin(), rels.end(), r);
  return {base + static_cast<std::size_t>(lo - rels.begin()),
          base + static_cast<std::size_t>(hi - rels.begin())};
}

}  // namespace

EdgeList KnowledgeGraph::out_edges(EntityId h) const {
  if (!valid(h)) return {};
  const std::size_t lo = out_offsets_[h.value], hi = out_offsets_[h.value + 1];
  return {std::span(out_rel_).subspan(lo, hi - lo),
          std::span(out_tail_).subspan(lo, hi - lo)};
}

EdgeList KnowledgeGraph::in_edges(EntityId t) const {
  if (!valid(t)) return {};
  const std::size_t lo = in_offsets_[t.value], hi = in_offsets_[t.value + 1];
  return {std::span(in_rel_).subspan(lo, hi - lo),
          std::span(in_head_).subspan(lo, hi - lo)};
}

std::span<const EntityId> KnowledgeGraph::outgoing(EntityId h, RelationId r) const {
  if (!valid(h)) return {};
  const std::size_t base = out_offsets_[h.value];
  auto [lo, hi] = rel_range(out_edges(h).rels, base, r);
  return std::span(out_tail_).subspan(lo, hi - lo);
}

std::span<const EntityId> KnowledgeGraph::incoming(EntityId t, RelationId r) const {
  if (!valid(t)) return {};
  const std::size_t base = in_offsets_[t.value];
  auto [lo, hi] = rel_range(in_edges(t).rels, base, r);
  return std::span(in_head_).subspan(lo, hi - lo);
}

bool KnowledgeGraph::contains(EntityId h, RelationId r, EntityId t) const {
  auto tails = outgoing(h, r);
  return std::binary_search(tails.begin(), tails.end(), t);
}

std::optional<double> KnowledgeGraph::weight(EntityId h, RelationId r, EntityId t) const {
  if (!valid(h)) return std::nullopt;
  auto tails = outgoing(h, r);
  auto it = std::lower_bound(tails.begin(), tails.end(), t);
  if (it == tails.end() || *it != t) return std::nullopt;
  const auto index = static_cast<std::size_t>(&*it - out_tail_.data());
  return triples_[index].weight;
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view surface) const {
  if (auto id = entities_.find(normalize_entity(surface))) return EntityId{*id};
  return std::nullopt;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view name) const {
  if (auto id = relations_.find(name)) return RelationId{*id};
  return std::nullopt;
}

// Cache layout, little-endian host order:
//   magic[8] u32 version u64 rows_added u64 duplicates
//   u32 n_entities {u32 len, bytes}... u32 n_relations {u32 len, bytes}...
//   u64 n_triples {u32 head, u32 rel, u32 tail, f64 weight}...
namespace {

constexpr std::array<char, 8> kCacheMagic = {'K', 'H', 'O', 'P', 'G', 'R', 'F', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw std::runtime_error("graph cache truncated");
  }
  return v;
}

template <class Surface>
void put_strings(std::ostream& out, std::size_t n, Surface surface) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::string& s = surface(i);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
}

Interner get_strings(std::istream& in) {
  Interner interner;
  const auto n = get<std::uint32_t>(in);
  interner.reserve(n);
  std::string buf;
  for (std::uint32_t i = 0; i < n; ++i) {
    buf.resize(get<std::uint32_t>(in));
    if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size()))) {
      throw std::runtime_error("graph cache truncated");
    }
    if (interner.intern(buf) != i) throw std::runtime_error("graph cache has duplicate strings");
  }
  return interner;
}

}  // namespace

void write_graph_cache(const KnowledgeGraph& graph, std::ostream& out) {
  out.write(kCacheMagic.data(), kCacheMagic.size());
  put<std::uint32_t>(out, kCacheVersion);
  put<std::uint64_t>(out, graph.stats().rows_added);
  put<std::uint64_t>(out, graph.stats().duplicates_collapsed);
  // Surfaces are re-interned in id order on read, which restores the handles.
  put_strings(out, graph.entity_count(),
              [&](std::uint32_t i) -> const std::string& { return graph.surface(EntityId{i}); });
  put_strings(out, graph.relation_count(), [&](std::uint32_t i) -> const std::string& {
    return graph.relation_name(RelationId{i});
  });
  put<std::uint64_t>(out, graph.triple_count());
  for (const Triple& t : graph.triples()) {
    put(out, t.head.value);
    put(out, t.rel.value);
    put(out, t.tail.value);
    put(out, t.weight);
  }
}

KnowledgeGraph read_graph_cache(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kCacheMagic) {
    throw std::runtime_error("not a khop graph cache (bad magic)");
  }
  if (const auto version = get<std::uint32_t>(in); version != kCacheVersion) {
    throw std::runtime_error("unsupported graph cache version " + std::to_string(version));
  }
  const auto rows_added = get<std::uint64_t>(in);
  const auto duplicates = get<std::uint64_t>(in);
  Interner entities = get_strings(in);
  Interner relations = get_strings(in);
  const auto n = get<std::uint64_t>(in);
  std::vector<Triple> rows;
  rows.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Triple t;
    t.head.value = get<std::uint32_t>(in);
    t.rel.value = get<std::uint32_t>(in);
    t.tail.value = get<std::uint32_t>(in);
    t.weight = get<double>(in);
    if (t.head.value >= entities.size() || t.tail.value >= entities.size() ||
        t.rel.value >= relations.size()) {
      throw std::runtime_error("graph cache triple references unknown handle");
    }
    rows.push_back(t);
  }
  KnowledgeGraph g = KnowledgeGraph::assemble(std::move(rows), std::move(entities),
                                              std::move(relations));
  g.stats_.rows_added = rows_added;
  g.stats_.duplicates_collapsed = duplicates;
  return g;
}

}  // namespace khop
