// Seeded synthetic knowledge graphs for the acceptance run. Entities are typed
// and every relation links two fixed types, the way most commonsense relations
// do. Popularity is Zipf-like and shared by both ends of a relation, so
// popular entities are hubs in and out.
#ifndef KHOP_TESTS_SYNTHETIC_H_
#define KHOP_TESTS_SYNTHETIC_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "khop/graph.h"

namespace khop::synthetic {

struct Type {
  std::vector<std::string> modifiers;
  std::vector<std::string> nouns;
};

enum : int { kPerson, kAnimal, kObject, kFood, kPlace, kActivity, kQuality, kEmotion, kMaterial };

inline const std::vector<Type>& types() {
  static const std::vector<Type> t{
      {{"young", "old", "tired", "busy", "curious"},
       {"child", "student", "farmer", "doctor", "teacher", "baker", "sailor", "painter", "runner"}},
      {{"small", "wild", "old"}, {"dog", "cat", "horse", "goat", "owl", "fox", "rabbit", "duck"}},
      {{"small", "heavy", "new", "broken", "shiny"},
       {"knife", "hammer", "cup", "blanket", "ladder", "bottle", "pencil", "rope", "bucket", "lamp",
        "spoon", "brush"}},
      {{"fresh", "sweet", "warm"}, {"bread", "apple", "soup", "cheese", "honey", "rice", "carrot", "cake"}},
      {{"quiet", "crowded"},
       {"kitchen", "garage", "office", "park", "library", "market", "harbor", "barn", "forest", "school"}},
      {{"slow", "careful"},
       {"cooking", "cutting", "painting", "climbing", "reading", "sleeping", "fishing", "singing",
        "cleaning", "digging"}},
      {{"very"}, {"sharp", "soft", "loud", "bright", "fragile", "sticky", "smooth", "dusty"}},
      {{"deep"}, {"joy", "anger", "fear", "relief", "pride", "boredom"}},
      {{}, {"wood", "steel", "glass", "cotton", "clay", "plastic"}},
  };
  return t;
}

struct RelationSpec {
  const char* name;
  int head_type;
  int tail_type;
};

inline constexpr std::array<RelationSpec, 14> kRelations{{
    {"Desires", kPerson, kFood},
    {"Desires", kAnimal, kFood},
    {"CapableOf", kPerson, kActivity},
    {"CapableOf", kAnimal, kActivity},
    {"AtLocation", kObject, kPlace},
    {"AtLocation", kAnimal, kPlace},
    {"UsedFor", kObject, kActivity},
    {"HasProperty", kObject, kQuality},
    {"HasProperty", kFood, kQuality},
    {"Causes", kActivity, kEmotion},
    {"MadeOf", kObject, kMaterial},
    {"HasPrerequisite", kActivity, kObject},
    {"LocatedNear", kPlace, kPlace},
    {"HasA", kPerson, kObject},
}};

using RawTriple = std::tuple<std::string, std::string, std::string>;

// `n_triples` distinct triples, deterministic in `seed`. `skew` is the Zipf
// exponent of entity popularity within a type.
inline std::vector<RawTriple> typed_triples(std::uint64_t seed, std::size_t n_triples, double skew = 0.8) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> entities(types().size());
  std::vector<std::discrete_distribution<std::size_t>> popular;
  for (std::size_t t = 0; t < types().size(); ++t) {
    for (const auto& noun : types()[t].nouns) {
      entities[t].push_back(noun);
      for (const auto& mod : types()[t].modifiers) entities[t].push_back(mod + " " + noun);
    }
    std::shuffle(entities[t].begin(), entities[t].end(), rng);
    std::vector<double> w;
    for (std::size_t i = 0; i < entities[t].size(); ++i) w.push_back(1.0 / std::pow(i + 1.0, skew));
    popular.emplace_back(w.begin(), w.end());
  }
  std::set<RawTriple> seen;
  std::vector<RawTriple> out;
  while (out.size() < n_triples) {
    const auto& rel = kRelations[rng() % kRelations.size()];
    const auto ht = static_cast<std::size_t>(rel.head_type);
    const auto tt = static_cast<std::size_t>(rel.tail_type);
    const std::string& head = entities[ht][popular[ht](rng)];
    const std::string& tail = entities[tt][popular[tt](rng)];
    if (head == tail) continue;
    RawTriple t{head, rel.name, tail};
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

inline KnowledgeGraph build(const std::vector<RawTriple>& triples) {
  GraphBuilder b;
  for (const auto& [h, r, t] : triples) b.add(h, r, t);
  return std::move(b).build();
}

}  // namespace khop::synthetic

#endif  // KHOP_TESTS_SYNTHETIC_H_
