#ifndef KHOP_GRAPH_H_
#define KHOP_GRAPH_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace khop {

// Dense integer handle. The tag keeps entity and relation handles apart.
template <class Tag>
struct Handle {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(Handle, Handle) = default;
};

struct EntityTag;
struct RelationTag;
using EntityId = Handle<EntityTag>;
using RelationId = Handle<RelationTag>;

struct Triple {
  EntityId head;
  RelationId rel;
  EntityId tail;
  double weight = 1.0;
};

// Lowercases ASCII, turns underscores into spaces, collapses runs of
// whitespace to one space and trims. Idempotent.
std::string normalize_entity(std::string_view raw);

// Bijective string <-> dense id map. Ids are assigned in first-seen order.
class Interner {
 public:
  std::uint32_t intern(std::string_view s);
  std::optional<std::uint32_t> find(std::string_view s) const;
  const std::string& surface(std::uint32_t id) const { return strings_[id]; }
  std::size_t size() const { return strings_.size(); }
  void reserve(std::size_t n);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
  std::vector<std::string> strings_;
};

struct GraphStats {
  std::size_t rows_added = 0;
  std::size_t duplicates_collapsed = 0;
};

// Edges of one entity in one direction, sorted by (relation, other end).
struct EdgeList {
  std::span<const RelationId> rels;
  std::span<const EntityId> others;
  std::size_t size() const { return rels.size(); }
};

class KnowledgeGraph;

// Collects rows and interns surfaces. Consumed by build().
class GraphBuilder {
 public:
  // Normalizes the surface first. Throws std::invalid_argument when the
  // normalized surface is empty.
  EntityId entity(std::string_view surface);
  RelationId relation(std::string_view name);

  // Handles must come from this builder. Throws on negative weight.
  void add(const Triple& triple);
  void add(std::string_view head, std::string_view rel, std::string_view tail,
           double weight = 1.0);

  std::size_t rows() const { return rows_.size(); }

  KnowledgeGraph build() &&;

 private:
  Interner entities_;
  Interner relations_;
  std::vector<Triple> rows_;
};

// Immutable indexed triple store. Safe for concurrent readers.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Tails t with (h, r, t) in the graph, ascending by handle.
  std::span<const EntityId> outgoing(EntityId h, RelationId r) const;
  // Heads h with (h, r, t) in the graph, ascending by handle.
  std::span<const EntityId> incoming(EntityId t, RelationId r) const;
  bool contains(EntityId h, RelationId r, EntityId t) const;

  EdgeList out_edges(EntityId h) const;
  EdgeList in_edges(EntityId t) const;

  // All triples sorted by (head, rel, tail).
  std::span<const Triple> triples() const { return triples_; }
  std::optional<double> weight(EntityId h, RelationId r, EntityId t) const;

  std::size_t triple_count() const { return triples_.size(); }
  std::size_t entity_count() const { return entities_.size(); }
  std::size_t relation_count() const { return relations_.size(); }

  const std::string& surface(EntityId e) const { return entities_.surface(e.value); }
  const std::string& relation_name(RelationId r) const {
    return relations_.surface(r.value);
  }
  // Looks up a raw surface after normalization.
  std::optional<EntityId> find_entity(std::string_view surface) const;
  std::optional<RelationId> find_relation(std::string_view name) const;

  const GraphStats& stats() const { return stats_; }

 private:
  friend class GraphBuilder;
  friend KnowledgeGraph read_graph_cache(std::istream& in);

  static KnowledgeGraph assemble(std::vector<Triple> rows, Interner entities,
                                 Interner relations);
  bool valid(EntityId e) const { return e.value < entities_.size(); }

  Interner entities_;
  Interner relations_;
  std::vector<Triple> triples_;

  // CSR by head: out_rel_/out_tail_ mirror triples_ order.
  std::vector<std::uint32_t> out_offsets_;
  std::vector<RelationId> out_rel_;
  std::vector<EntityId> out_tail_;
  // CSR by tail, sorted (tail, rel, head).
  std::vector<std::uint32_t> in_offsets_;
  std::vector<RelationId> in_rel_;
  std::vector<EntityId> in_head_;

  GraphStats stats_;
};

// Versioned binary cache ("KHOPGRF" magic). read throws std::runtime_error on
// a bad magic, version or truncated stream.
void write_graph_cache(const KnowledgeGraph& graph, std::ostream& out);
KnowledgeGraph read_graph_cache(std::istream& in);

}  // namespace khop

#endif  // KHOP_GRAPH_H_
