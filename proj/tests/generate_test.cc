#include <algorithm>
#include <set>

#include "doctest.h"
#include "khop/dataset.h"
#include "khop/generate.h"
#include "khop/util.h"
#include "oracle.h"

using namespace khop;

namespace {

const TemplateTable& table() { return TemplateTable::conceptnet_default(); }

std::set<std::string> distractors_of(const QASample& s) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < s.answers.size(); ++i) {
    if (i != s.correct_index) out.insert(s.answers[i]);
  }
  return out;
}

std::set<std::string> names(const KnowledgeGraph& g, const std::vector<EntityId>& ids) {
  std::set<std::string> out;
  for (auto e : ids) out.insert(g.surface(e));
  return out;
}

void check_sample_invariants(const QASample& s, std::size_t n) {
  REQUIRE(s.answers.size() == n + 1);
  CHECK(s.correct_index < s.answers.size());
  CHECK(std::set<std::string>(s.answers.begin(), s.answers.end()).size() == s.answers.size());
  CHECK_FALSE(mentions_phrase(s.question, s.correct_answer()));
  CHECK(s.question.find("[MASK]") != std::string::npos);
}

GenConfig uncapped(std::size_t n) {
  GenConfig c;
  c.n_distractors = n;
  c.max_samples_per_key.reset();
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("revolving door compositive fixture") {
  SUBCASE("two triples only: path exists but has no distractors") {
    GraphBuilder b;
    b.add("revolving door", "AtLocation", "bank");
    b.add("bank", "RelatedTo", "security");
    const auto g = std::move(b).build();
    auto r = gen_compositive(g, table(), GenConfig{});
    CHECK(r.samples.empty());
    CHECK(r.stats.compositive.candidates == 1);
    CHECK(r.stats.compositive.too_few_distractors == 1);
  }
  SUBCASE("with mall and hotel") {
    GraphBuilder b;
    b.add("revolving door", "AtLocation", "bank");
    b.add("bank", "RelatedTo", "security");
    b.add("revolving door", "AtLocation", "mall");
    b.add("revolving door", "AtLocation", "hotel");
    const auto g = std::move(b).build();
    auto r = gen_compositive(g, table(), GenConfig{});
    REQUIRE(r.samples.size() == 1);
    const QASample& s = r.samples[0];
    check_sample_invariants(s, 2);
    CHECK(s.kind == SampleKind::kCompositive);
    CHECK(s.correct_answer() == "bank");
    CHECK(std::set<std::string>(s.answers.begin(), s.answers.end()) ==
          std::set<std::string>{"bank", "mall", "hotel"});
    CHECK(s.question ==
          "you are likely to find revolving door in [MASK]. [MASK] is related to security.");
    REQUIRE(s.provenance.size() == 2);
    CHECK(s.provenance[0] == ProvenanceTriple{"revolving door", "AtLocation", "bank"});
    CHECK(s.provenance[1] == ProvenanceTriple{"bank", "RelatedTo", "security"});
  }
}

TEST_CASE("compositive distractor conditions") {
  GraphBuilder b;
  b.add("a", "R", "key");
  b.add("key", "S", "z");
  b.add("a", "R", "c1");
  b.add("a", "R", "c2");
  b.add("c2", "S", "z");  // c2 would also answer
  b.add("a", "R", "a");   // self-loop on the head
  const auto g = std::move(b).build();
  const CompositivePath path{*g.find_entity("a"), *g.find_relation("R"), *g.find_entity("key"),
                             *g.find_relation("S"), *g.find_entity("z")};
  CHECK(names(g, compositive_distractors(g, path)) == std::set<std::string>{"c1"});

  GraphBuilder lone;
  lone.add("a", "R", "key");
  lone.add("key", "S", "z");
  const auto g2 = std::move(lone).build();
  const CompositivePath p2{*g2.find_entity("a"), *g2.find_relation("R"), *g2.find_entity("key"),
                           *g2.find_relation("S"), *g2.find_entity("z")};
  CHECK(compositive_distractors(g2, p2).empty());
}

TEST_CASE("conjunctive gym fixture") {
  GraphBuilder b;
  b.add("gym", "UsedFor", "basketball");
  b.add("gym", "UsedFor", "football");
  b.add("court", "UsedFor", "basketball");
  const auto g = std::move(b).build();
  auto cfg = GenConfig{};
  cfg.n_distractors = 1;
  auto r = gen_conjunctive(g, table(), cfg);
  REQUIRE(r.samples.size() == 1);
  const auto& s = r.samples[0];
  check_sample_invariants(s, 1);
  CHECK(s.correct_answer() == "gym");
  CHECK(distractors_of(s) == std::set<std::string>{"court"});
  CHECK(s.question == "[MASK] is used for basketball. [MASK] is used for football.");
}

TEST_CASE("conjunctive XOR rule") {
  GraphBuilder b;
  b.add("gym", "UsedFor", "basketball");
  b.add("gym", "UsedFor", "football");
  b.add("stadium", "UsedFor", "basketball");
  b.add("stadium", "UsedFor", "football");  // both: excluded
  b.add("library", "UsedFor", "reading");   // neither: excluded
  const auto g = std::move(b).build();
  const auto used = *g.find_relation("UsedFor");
  const ConjunctivePair pair{*g.find_entity("gym"), used, *g.find_entity("basketball"), used,
                             *g.find_entity("football")};
  CHECK(conjunctive_distractors(g, pair).empty());
  auto cfg = GenConfig{};
  cfg.n_distractors = 1;
  auto r = gen_conjunctive(g, table(), cfg);
  // gym/basketball/football and stadium/basketball/football both lack distractors.
  CHECK(r.samples.empty());
  CHECK(r.stats.conjunctive.too_few_distractors == 2);
}

TEST_CASE("generators match the brute-force oracle on random graphs") {
  for (std::size_t n : {1u, 2u}) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      const auto raw = oracle::random_graph(seed);
      const auto g = raw.build();
      const GenConfig cfg = uncapped(n);

      const auto comp_oracle = oracle::compositive(raw);
      const auto comp = gen_compositive(g, table(), cfg);
      std::set<oracle::Provenance> expected, got;
      for (const auto& [prov, cands] : comp_oracle) {
        if (cands.size() >= n) expected.insert(prov);
      }
      for (const auto& s : comp.samples) {
        const auto prov = oracle::provenance_of(s, false);
        got.insert(prov);
        check_sample_invariants(s, n);
        CHECK(s.correct_answer() == std::get<2>(prov[0]));
        const auto& cands = comp_oracle.at(prov);
        for (const auto& d : distractors_of(s)) CHECK(cands.contains(d));
      }
      CHECK(got == expected);
      CHECK(comp.samples.size() == expected.size());

      // Full distractor sets, not only the n that were drawn.
      for (const auto& [prov, cands] : comp_oracle) {
        const auto& [h, r1, k] = prov[0];
        const auto& [k2, r2, t] = prov[1];
        const CompositivePath path{*g.find_entity(h), *g.find_relation(r1), *g.find_entity(k),
                                   *g.find_relation(r2), *g.find_entity(t)};
        CHECK(names(g, compositive_distractors(g, path)) == cands);
      }

      const auto conj_oracle = oracle::conjunctive(raw);
      const auto conj = gen_conjunctive(g, table(), cfg);
      expected.clear();
      got.clear();
      for (const auto& [prov, cands] : conj_oracle) {
        if (cands.size() >= n) expected.insert(prov);
      }
      for (const auto& s : conj.samples) {
        const auto prov = oracle::provenance_of(s, true);
        got.insert(prov);
        check_sample_invariants(s, n);
        CHECK(s.correct_answer() == std::get<0>(prov[0]));
        const auto& cands = conj_oracle.at(prov);
        for (const auto& d : distractors_of(s)) CHECK(cands.contains(d));
      }
      CHECK(got == expected);
      for (const auto& [prov, cands] : conj_oracle) {
        const auto& [k, r1, t1] = prov[0];
        const auto& [k2, r2, t2] = prov[1];
        const ConjunctivePair pair{*g.find_entity(k), *g.find_relation(r1), *g.find_entity(t1),
                                   *g.find_relation(r2), *g.find_entity(t2)};
        CHECK(names(g, conjunctive_distractors(g, pair)) == cands);
      }
    }
  }
}

TEST_CASE("per-key cap keeps a subset of the uncapped output") {
  GraphBuilder b;
  // Hub key with 6 in-edges and 6 out-edges; every path has distractors.
  for (int i = 0; i < 6; ++i) {
    b.add("h" + std::to_string(i), "R", "hub");
    for (int j = 0; j < 3; ++j) b.add("h" + std::to_string(i), "R", "d" + std::to_string(j));
    b.add("hub", "S", "t" + std::to_string(i));
  }
  const auto g = std::move(b).build();
  GenConfig cfg;
  cfg.enable_conjunctive = cfg.enable_single_hop = false;
  cfg.max_samples_per_key.reset();
  const auto all = gen_compositive(g, table(), cfg);
  CHECK(all.samples.size() == 36);
  cfg.max_samples_per_key = 5;
  const auto capped = gen_compositive(g, table(), cfg);
  REQUIRE(capped.samples.size() == 5);
  CHECK(capped.stats.compositive.capped > 0);
  std::set<std::string> all_ids;
  for (const auto& s : all.samples) all_ids.insert(s.id);
  for (const auto& s : capped.samples) CHECK(all_ids.contains(s.id));
  // Different seeds pick different subsets (with overwhelming probability).
  cfg.seed = 99;
  const auto other = gen_compositive(g, table(), cfg);
  std::set<std::string> a, c;
  for (const auto& s : capped.samples) a.insert(s.id);
  for (const auto& s : other.samples) c.insert(s.id);
  CHECK(a != c);
}

TEST_CASE("single-hop generation") {
  SUBCASE("single triple graph is skipped") {
    GraphBuilder b;
    b.add("revolving door", "AtLocation", "bank");
    const auto g = std::move(b).build();
    const auto r = gen_single_hop(g, table(), GenConfig{});
    CHECK(r.samples.empty());
    CHECK(r.stats.single_hop.too_few_distractors == 1);
  }
  SUBCASE("answers are distinct and include the tail") {
    GraphBuilder b;
    b.add("revolving door", "AtLocation", "bank");
    b.add("shop", "AtLocation", "mall");
    b.add("bank", "RelatedTo", "security");
    const auto g = std::move(b).build();
    const auto r = gen_single_hop(g, table(), GenConfig{});
    const auto it = std::find_if(r.samples.begin(), r.samples.end(), [](const QASample& s) {
      return s.provenance[0].head == "revolving door";
    });
    REQUIRE(it != r.samples.end());
    check_sample_invariants(*it, 2);
    CHECK(it->correct_answer() == "bank");
    CHECK(it->question == "you are likely to find revolving door in [MASK].");
    CHECK(std::set<std::string>(it->answers.begin(), it->answers.end()) ==
          std::set<std::string>{"bank", "mall", "security"});
  }
}

TEST_CASE("generation is deterministic and kinds are independent") {
  const auto raw = oracle::random_graph(5);
  const auto g = raw.build();
  GenConfig cfg;
  cfg.seed = 1234;
  const auto a = generate(g, table(), cfg);
  const auto b = generate(g, table(), cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(to_json_line(a.samples[i]) == to_json_line(b.samples[i]));
  }

  auto only = [&](SampleKind k) {
    std::vector<std::string> lines;
    for (const auto& s : a.samples) {
      if (s.kind == k) lines.push_back(to_json_line(s));
    }
    return lines;
  };
  GenConfig no_comp = cfg;
  no_comp.enable_compositive = false;
  const auto without = generate(g, table(), no_comp);
  std::vector<std::string> conj_lines, single_lines;
  for (const auto& s : without.samples) {
    CHECK(s.kind != SampleKind::kCompositive);
    (s.kind == SampleKind::kConjunctive ? conj_lines : single_lines).push_back(to_json_line(s));
  }
  CHECK(conj_lines == only(SampleKind::kConjunctive));
  CHECK(single_lines == only(SampleKind::kSingleHop));

  GenConfig none = cfg;
  none.enable_compositive = none.enable_conjunctive = none.enable_single_hop = false;
  CHECK(generate(g, table(), none).samples.empty());
}

TEST_CASE("random negatives when hard negatives are disabled") {
  GraphBuilder b;
  b.add("revolving door", "AtLocation", "bank");
  b.add("bank", "RelatedTo", "security");
  for (int i = 0; i < 10; ++i) b.add("x" + std::to_string(i), "IsA", "y" + std::to_string(i));
  const auto g = std::move(b).build();
  GenConfig cfg;
  cfg.hard_negatives = false;
  cfg.enable_conjunctive = cfg.enable_single_hop = false;
  const auto r = gen_compositive(g, table(), cfg);
  REQUIRE(r.samples.size() == 1);
  check_sample_invariants(r.samples[0], 2);
  for (const auto& d : distractors_of(r.samples[0])) {
    CHECK(d != "revolving door");
    CHECK(d != "security");
  }

  const EntityId excluded[] = {*g.find_entity("bank")};
  const auto picks = random_distractors(g, 5, excluded, 77);
  CHECK(picks.size() == 5);
  CHECK(std::set<EntityId>(picks.begin(), picks.end()).size() == 5);
  CHECK(std::find(picks.begin(), picks.end(), excluded[0]) == picks.end());
  CHECK(random_distractors(g, 100, excluded, 77).size() == g.entity_count() - 1);
}

TEST_CASE("answer leaking into the question is skipped") {
  GraphBuilder b;
  b.add("bank account", "RelatedTo", "bank");
  b.add("bank", "RelatedTo", "money");
  b.add("bank account", "RelatedTo", "x");
  b.add("bank account", "RelatedTo", "y");
  const auto g = std::move(b).build();
  const auto r = gen_compositive(g, table(), GenConfig{});
  CHECK(r.samples.empty());
  CHECK(r.stats.compositive.answer_leak == 1);
}

TEST_CASE("invalid configuration") {
  const auto g = oracle::random_graph(1).build();
  GenConfig cfg;
  cfg.n_distractors = 0;
  CHECK_THROWS_AS(generate(g, table(), cfg), std::invalid_argument);
  cfg.n_distractors = 2;
  cfg.max_samples_per_key = 0;
  CHECK_THROWS_AS(generate(g, table(), cfg), std::invalid_argument);
}
