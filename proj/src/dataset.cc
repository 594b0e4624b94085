#include "khop/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "khop/util.h"

namespace khop {

using ojson = nlohmann::ordered_json;

std::string to_json_line(const QASample& s) {
  ojson j;
  j["id"] = s.id;
  j["question"] = s.question;
  j["answers"] = s.answers;
  j["label"] = s.correct_index;
  j["kind"] = to_string(s.kind);
  ojson prov = ojson::array();
  for (const auto& p : s.provenance) prov.push_back({p.head, p.relation, p.tail});
  j["provenance"] = std::move(prov);
  return j.dump();
}

QASample from_json_line(std::string_view line) {
  const ojson j = ojson::parse(line);
  QASample s;
  s.id = j.at("id").get<std::string>();
  s.question = j.at("question").get<std::string>();
  s.answers = j.at("answers").get<std::vector<std::string>>();
  s.correct_index = j.at("label").get<std::size_t>();
  s.kind = parse_sample_kind(j.at("kind").get<std::string>());
  if (auto it = j.find("provenance"); it != j.end()) {
    for (const auto& t : *it) {
      if (!t.is_array() || t.size() != 3) throw std::invalid_argument("provenance entry must be [head, relation, tail]");
      s.provenance.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                              t[2].get<std::string>()});
    }
  }
  if (s.answers.empty()) throw std::invalid_argument("answers must be non-empty");
  if (s.correct_index >= s.answers.size()) throw std::invalid_argument("label out of range");
  return s;
}

void write_jsonl(std::span<const QASample> samples, std::ostream& out) {
  for (const auto& s : samples) out << to_json_line(s) << '\n';
}

void write_jsonl(std::span<const QASample> samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path.string());
  write_jsonl(samples, out);
  if (!out) throw DatasetError("write failed for " + path.string());
}

std::vector<QASample> read_jsonl(std::istream& in, std::string_view source) {
  std::vector<QASample> out;
  std::unordered_set<std::string> ids;
  std::string line;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto where = [&] { return std::string(source) + ":" + std::to_string(row) + ": "; };
    try {
      out.push_back(from_json_line(line));
    } catch (const std::exception& e) {
      throw DatasetError(where() + e.what());
    }
    if (!ids.insert(out.back().id).second) {
      throw DatasetError(where() + "duplicate id " + out.back().id);
    }
  }
  return out;
}

std::vector<QASample> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  return read_jsonl(in, path.string());
}

std::vector<QASample> dedup(std::vector<QASample> samples) {
  std::set<std::tuple<std::string, std::vector<std::string>, std::string>> seen;
  std::vector<QASample> out;
  out.reserve(samples.size());
  for (auto& s : samples) {
    auto sorted = s.answers;
    std::sort(sorted.begin(), sorted.end());
    if (seen.emplace(s.question, std::move(sorted), s.correct_answer()).second) {
      out.push_back(std::move(s));
    }
  }
  return out;
}

void SplitConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
}

std::size_t train_size(std::size_t n, double train_fraction) {
  const auto rounded = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(rounded, 1, n - 1);
}

SplitResult split(std::vector<QASample> samples, const SplitConfig& config) {
  config.validate();
  if (samples.size() < 2) throw std::invalid_argument("split needs at least 2 samples");
  Rng rng(splitmix64(config.seed));
  for (std::size_t i = samples.size() - 1; i > 0; --i) {
    std::swap(samples[i], samples[uniform_index(rng, i + 1)]);
  }
  const std::size_t n_train = train_size(samples.size(), config.train_fraction);
  SplitResult out;
  out.valid.assign(std::make_move_iterator(samples.begin() + static_cast<std::ptrdiff_t>(n_train)),
                   std::make_move_iterator(samples.end()));
  samples.resize(n_train);
  out.train = std::move(samples);
  return out;
}

std::vector<QASample> merge(std::span<const std::filesystem::path> paths,
                            std::span<const double> weights, std::uint64_t seed) {
  if (paths.empty()) throw std::invalid_argument("merge needs at least one input");
  if (!weights.empty() && weights.size() != paths.size()) {
    throw std::invalid_argument("merge weights must match the number of inputs");
  }
  std::vector<QASample> out;
  std::unordered_set<std::string> ids;
  for (std::size_t source = 0; source < paths.size(); ++source) {
    std::vector<QASample> part = read_jsonl(paths[source]);
    const double w = weights.empty() ? 1.0 : weights[source];
    if (!(w > 0.0 && w <= 1.0)) throw std::invalid_argument("merge weights must lie in (0, 1]");
    if (w < 1.0) {
      const auto keep = static_cast<std::size_t>(std::llround(w * static_cast<double>(part.size())));
      // Selection sampling (Knuth's algorithm S) keeps file order.
      Rng rng(splitmix64(seed ^ splitmix64(source + 1)));
      std::vector<QASample> kept;
      kept.reserve(keep);
      std::size_t needed = keep;
      for (std::size_t i = 0; i < part.size() && needed > 0; ++i) {
        if (uniform_index(rng, part.size() - i) < needed) {
          kept.push_back(std::move(part[i]));
          --needed;
        }
      }
      part = std::move(kept);
    }
    for (auto& s : part) {
      while (!ids.insert(s.id).second) {
        s.id = hex64(Fnv1a().add(s.id).add("@").add(std::uint64_t{source}).digest());
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

BenchmarkFormat parse_benchmark_format(std::string_view name) {
  if (name == "csqa") return BenchmarkFormat::kCsqa;
  if (name == "piqa-style-binary" || name == "binary") return BenchmarkFormat::kBinaryChoice;
  throw std::invalid_argument("unknown benchmark format: " + std::string(name));
}

namespace {

QASample adapt_csqa(const nlohmann::json& j) {
  QASample s;
  s.kind = SampleKind::kBenchmark;
  s.id = j.at("id").get<std::string>();
  const auto& q = j.at("question");
  s.question = q.at("stem").get<std::string>();
  const std::string key = j.at("answerKey").get<std::string>();
  bool found = false;
  for (const auto& choice : q.at("choices")) {
    if (choice.at("label").get<std::string>() == key) {
      s.correct_index = s.answers.size();
      found = true;
    }
    s.answers.push_back(choice.at("text").get<std::string>());
  }
  if (!found) throw std::invalid_argument("answerKey '" + key + "' matches no choice label");
  return s;
}

QASample adapt_binary(const nlohmann::json& j, std::size_t row) {
  QASample s;
  s.kind = SampleKind::kBenchmark;
  s.question = j.at("goal").get<std::string>();
  s.answers = {j.at("sol1").get<std::string>(), j.at("sol2").get<std::string>()};
  s.correct_index = j.at("label").get<std::size_t>();
  if (s.correct_index > 1) throw std::invalid_argument("label must be 0 or 1");
  if (auto it = j.find("id"); it != j.end()) {
    s.id = it->is_string() ? it->get<std::string>() : it->dump();
  } else {
    s.id = hex64(Fnv1a().add(std::uint64_t{row}).add(s.question).digest());
  }
  return s;
}

}  // namespace

std::vector<QASample> adapt_benchmark(std::istream& in, BenchmarkFormat format,
                                      std::string_view source) {
  std::vector<QASample> out;
  std::string line;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back(format == BenchmarkFormat::kCsqa ? adapt_csqa(j) : adapt_binary(j, row));
    } catch (const std::exception& e) {
      throw DatasetError(std::string(source) + ":" + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

std::vector<QASample> adapt_benchmark(const std::filesystem::path& path,
                                      BenchmarkFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  return adapt_benchmark(in, format, path.string());
}

DatasetStats stats(std::span<const QASample> samples) {
  DatasetStats st;
  st.samples = samples.size();
  std::unordered_set<std::string> entities;
  std::size_t words = 0;
  for (const auto& s : samples) {
    ++st.by_kind[std::string(to_string(s.kind))];
    ++st.answer_counts[s.answers.size()];
    entities.insert(s.answers.begin(), s.answers.end());
    for (const auto& p : s.provenance) {
      entities.insert(p.head);
      entities.insert(p.tail);
    }
    std::istringstream in(s.question);
    for (std::string w; in >> w;) ++words;
  }
  st.distinct_entities = entities.size();
  if (!samples.empty()) st.mean_question_words = static_cast<double>(words) / samples.size();
  return st;
}

ojson to_json(const KindStats& s) {
  ojson j;
  j["candidates"] = s.candidates;
  j["emitted"] = s.emitted;
  j["too_few_distractors"] = s.too_few_distractors;
  j["answer_leak"] = s.answer_leak;
  j["capped"] = s.capped;
  return j;
}

ojson to_json(const GenStats& s) {
  ojson j;
  j["compositive"] = to_json(s.compositive);
  j["conjunctive"] = to_json(s.conjunctive);
  j["single_hop"] = to_json(s.single_hop);
  return j;
}

ojson to_json(const DatasetStats& s) {
  ojson j;
  j["samples"] = s.samples;
  j["by_kind"] = ojson::object();
  for (const auto& [k, v] : s.by_kind) j["by_kind"][k] = v;
  j["answer_counts"] = ojson::object();
  for (const auto& [k, v] : s.answer_counts) j["answer_counts"][std::to_string(k)] = v;
  j["distinct_entities"] = s.distinct_entities;
  j["mean_question_words"] = s.mean_question_words;
  if (s.generation) j["generation"] = to_json(*s.generation);
  return j;
}

}  // namespace khop
