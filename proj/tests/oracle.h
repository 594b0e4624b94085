// Brute-force reference implementations for the generator tests. Everything
// here works on plain string triples and never touches KnowledgeGraph's
// indices, so it can check them.
#ifndef KHOP_TESTS_ORACLE_H_
#define KHOP_TESTS_ORACLE_H_

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "khop/graph.h"
#include "khop/sample.h"

namespace khop::oracle {

using RawTriple = std::tuple<std::string, std::string, std::string>;

struct RawGraph {
  std::vector<RawTriple> triples;  // unique rows
  std::set<RawTriple> members;
  std::set<std::string> entities;

  void add(const std::string& h, const std::string& r, const std::string& t) {
    if (members.insert({h, r, t}).second) triples.emplace_back(h, r, t);
    entities.insert(h);
    entities.insert(t);
  }
  bool has(const std::string& h, const std::string& r, const std::string& t) const {
    return members.contains({h, r, t});
  }
  KnowledgeGraph build() const {
    GraphBuilder b;
    for (const auto& [h, r, t] : triples) b.add(h, r, t);
    return std::move(b).build();
  }
};

// Random graph with entity names "e<i>" and relation names "R<i>".
inline RawGraph random_graph(std::uint64_t seed, int max_entities = 50, int max_relations = 5,
                             int max_triples = 300) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  const int n_ent = pick(4, max_entities);
  const int n_rel = pick(1, max_relations);
  const int n_tri = pick(1, max_triples);
  RawGraph g;
  for (int i = 0; i < n_tri; ++i) {
    g.add("e" + std::to_string(pick(0, n_ent - 1)), "R" + std::to_string(pick(0, n_rel - 1)),
          "e" + std::to_string(pick(0, n_ent - 1)));
  }
  return g;
}

using Provenance = std::vector<RawTriple>;

// Compositive paths keyed by their two provenance triples, mapped to the
// full set of admissible distractors, checked literally per entity.
inline std::map<Provenance, std::set<std::string>> compositive(const RawGraph& g) {
  std::map<Provenance, std::set<std::string>> out;
  for (const auto& t1 : g.triples) {
    for (const auto& t2 : g.triples) {
      const auto& [e1h, r1, e1t] = t1;
      const auto& [e2h, r2, e2t] = t2;
      if (e1t != e2h) continue;
      const std::string& key = e1t;
      if (key == e1h || key == e2t || e2t == e1h) continue;
      std::set<std::string> cands;
      for (const auto& e3 : g.entities) {
        if (!g.has(e1h, r1, e3)) continue;  // relevance
        if (e3 == key || e3 == e1h) continue;
        if (g.has(e3, r2, e2t)) continue;  // would also answer the question
        cands.insert(e3);
      }
      out[{t1, t2}] = std::move(cands);
    }
  }
  return out;
}

// Conjunctive pairs keyed by the provenance triples in sorted order.
inline std::map<Provenance, std::set<std::string>> conjunctive(const RawGraph& g) {
  std::map<Provenance, std::set<std::string>> out;
  for (const auto& t1 : g.triples) {
    for (const auto& t2 : g.triples) {
      if (!(t1 < t2)) continue;
      const auto& [k1, r1, e1t] = t1;
      const auto& [k2, r2, e2t] = t2;
      if (k1 != k2 || e1t == e2t || e1t == k1 || e2t == k1) continue;
      std::set<std::string> cands;
      for (const auto& e3 : g.entities) {
        if (e3 == k1) continue;
        const bool a = g.has(e3, r1, e1t);
        const bool b = g.has(e3, r2, e2t);
        if (a != b) cands.insert(e3);
      }
      out[{t1, t2}] = std::move(cands);
    }
  }
  return out;
}

inline Provenance provenance_of(const QASample& s, bool sort) {
  Provenance p;
  for (const auto& t : s.provenance) p.emplace_back(t.head, t.relation, t.tail);
  if (sort) std::sort(p.begin(), p.end());
  return p;
}

}  // namespace khop::oracle

#endif  // KHOP_TESTS_ORACLE_H_
