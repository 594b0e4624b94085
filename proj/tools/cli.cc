#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "khop/dataset.h"
#include "khop/generate.h"
#include "khop/graph.h"
#include "khop/ingest.h"
#include "khop/loss.h"
#include "khop/scorer.h"
#include "khop/templates.h"
#include "khop/util.h"

namespace khop::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Bad flag values that CLI11 cannot check on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
};

void print_report(const Io& io, const ojson& report) { io.out << report.dump(2) << '\n'; }

// Written next to every output artifact as "<artifact>.manifest.json". Holds
// no timestamps or absolute paths of its own, so identical runs produce
// identical manifests.
void write_manifest(const fs::path& artifact, std::string_view command, ojson config,
                    const std::vector<fs::path>& inputs, ojson counters) {
  ojson m;
  m["tool"] = "khop";
  m["version"] = KHOP_VERSION;
  m["command"] = command;
  m["config"] = std::move(config);
  m["inputs"] = ojson::array();
  for (const auto& p : inputs) {
    m["inputs"].push_back({{"path", p.string()}, {"fnv1a64", hex64(hash_file(p))}});
  }
  m["counters"] = std::move(counters);
  const fs::path path = artifact.string() + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  out << m.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void require_writable(const std::ofstream& out, const fs::path& path) {
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

ojson to_json(const IngestReport& r) {
  ojson j;
  j["rows_read"] = r.rows_read;
  j["rows_kept"] = r.rows_kept;
  j["rows_skipped_language"] = r.rows_skipped_language;
  j["rows_skipped_weight"] = r.rows_skipped_weight;
  j["rows_skipped_relation"] = r.rows_skipped_relation;
  j["rows_malformed"] = r.rows_malformed;
  return j;
}

ojson graph_summary(const KnowledgeGraph& kg) {
  ojson j;
  j["entities"] = kg.entity_count();
  j["relations"] = kg.relation_count();
  j["triples"] = kg.triple_count();
  j["duplicates_collapsed"] = kg.stats().duplicates_collapsed;
  return j;
}

// --- ingest options shared by `ingest` and `generate --input` ---

struct IngestFlags {
  std::string format = "conceptnet-csv";
  std::string lang = "en";
  double min_weight = 1.0;
  std::vector<std::string> exclude;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--format", format, "conceptnet-csv or generic-tsv")->capture_default_str();
    cmd.add_option("--lang", lang, "language code kept from ConceptNet URIs")->capture_default_str();
    cmd.add_option("--min-weight", min_weight, "drop rows below this weight")->capture_default_str();
    cmd.add_option("--exclude-relation", exclude, "relation to drop (repeatable)");
  }

  IngestConfig config() const {
    IngestConfig c;
    try {
      c.format = parse_dump_format(format);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    c.language = lang;
    c.min_weight = min_weight;
    c.excluded_relations.insert(exclude.begin(), exclude.end());
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["format"] = format;
    j["lang"] = lang;
    j["min_weight"] = min_weight;
    j["exclude_relation"] = exclude;
    return j;
  }
};

// --- ingest ---

struct IngestArgs {
  std::string input;
  std::string output;
  IngestFlags flags;
};

int cmd_ingest(const IngestArgs& a, const Io& io) {
  auto [kg, report] = load(a.input, a.flags.config());
  {
    std::ofstream out(a.output, std::ios::binary);
    require_writable(out, a.output);
    write_graph_cache(kg, out);
    require_writable(out, a.output);
  }
  ojson r;
  r["ingest"] = to_json(report);
  r["graph"] = graph_summary(kg);
  write_manifest(a.output, "ingest", a.flags.to_json(), {a.input}, r);
  print_report(io, r);
  return 0;
}

// --- generate ---

struct GenerateArgs {
  std::string graph;
  std::string input;
  IngestFlags flags;
  std::string templates;
  std::string output;
  std::uint64_t seed = 0;
  std::size_t n = 2;
  std::size_t max_per_key = 10;
  bool no_hard_negatives = false;
  bool no_compositive = false;
  bool no_conjunctive = false;
  bool no_single_hop = false;
  std::string mask = "[MASK]";
};

int cmd_generate(const GenerateArgs& a, const Io& io) {
  if (a.graph.empty() == a.input.empty()) throw UsageError("give exactly one of --graph or --input");
  GenConfig config;
  config.n_distractors = a.n;
  config.seed = a.seed;
  if (a.max_per_key > 0) config.max_samples_per_key = a.max_per_key;
  else config.max_samples_per_key.reset();
  config.hard_negatives = !a.no_hard_negatives;
  config.enable_compositive = !a.no_compositive;
  config.enable_conjunctive = !a.no_conjunctive;
  config.enable_single_hop = !a.no_single_hop;
  try {
    config.mask = MaskToken(a.mask);
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::vector<fs::path> inputs;
  ojson cfg;
  std::optional<KnowledgeGraph> kg;
  if (!a.graph.empty()) {
    std::ifstream in(a.graph, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + a.graph);
    kg = read_graph_cache(in);
    inputs.emplace_back(a.graph);
    cfg["graph"] = a.graph;
  } else {
    auto loaded = load(a.input, a.flags.config());
    kg = std::move(loaded.first);
    inputs.emplace_back(a.input);
    cfg["input"] = a.input;
    cfg["ingest"] = a.flags.to_json();
  }

  TemplateTable custom;
  const TemplateTable* table = &TemplateTable::conceptnet_default();
  if (!a.templates.empty()) {
    auto loaded = TemplateTable::load(a.templates);
    for (const auto& r : loaded.rejects) {
      io.err << "khop: " << a.templates << ":" << r.row << ": skipped template: " << r.reason << '\n';
    }
    custom = std::move(loaded.table);
    table = &custom;
    inputs.emplace_back(a.templates);
    cfg["templates"] = a.templates;
  }

  const GenResult result = generate(*kg, *table, config);
  write_jsonl(result.samples, fs::path(a.output));

  cfg["seed"] = a.seed;
  cfg["n"] = a.n;
  cfg["max_per_key"] = a.max_per_key;
  cfg["hard_negatives"] = config.hard_negatives;
  cfg["compositive"] = config.enable_compositive;
  cfg["conjunctive"] = config.enable_conjunctive;
  cfg["single_hop"] = config.enable_single_hop;
  cfg["mask"] = a.mask;

  ojson r;
  r["samples"] = result.samples.size();
  r["graph"] = graph_summary(*kg);
  r["generation"] = to_json(result.stats);
  write_manifest(a.output, "generate", cfg, inputs, r);
  print_report(io, r);
  return 0;
}

// --- score ---

// Per-candidate scores keyed by sample id, as written by an external scorer.
struct ScoreRecord {
  std::string id;
  std::vector<double> scores;
  std::optional<std::size_t> label;
  std::optional<std::string> kind;
};

std::vector<ScoreRecord> read_scores(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<ScoreRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(row) + ": ";
    ScoreRecord rec;
    try {
      const auto j = nlohmann::json::parse(line);
      rec.id = j.at("id").get<std::string>();
      rec.scores = j.at("scores").get<std::vector<double>>();
      if (auto it = j.find("label"); it != j.end()) rec.label = it->get<std::size_t>();
      if (auto it = j.find("kind"); it != j.end()) rec.kind = it->get<std::string>();
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
    if (rec.scores.empty()) throw std::runtime_error(where + "empty score list");
    if (!seen.insert(rec.id).second) throw std::runtime_error(where + "duplicate id " + rec.id);
    out.push_back(std::move(rec));
  }
  return out;
}

double parse_tau(double tau) {
  LossConfig c{tau};
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return tau;
}

struct Tally {
  std::size_t total = 0;
  std::size_t correct = 0;
  double loss = 0.0;
  std::size_t loss_count = 0;

  void add(bool hit, std::optional<double> l) {
    ++total;
    correct += hit ? 1 : 0;
    if (l) {
      loss += *l;
      ++loss_count;
    }
  }
  ojson to_json() const {
    ojson j;
    j["samples"] = total;
    j["correct"] = correct;
    j["accuracy"] = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    if (loss_count) j["mean_loss"] = loss / static_cast<double>(loss_count);
    return j;
  }
};

// InfoNCE needs a positive and at least one negative.
std::optional<double> sample_loss(const std::vector<double>& scores, std::size_t label, double tau) {
  if (scores.size() < 2) return std::nullopt;
  return infonce(ScoredBatch::from_scores(scores, label), {tau});
}

struct ScoreArgs {
  std::string dataset;
  std::string scorer;
  std::string output;
  double tau = kDefaultTemperature;
  std::string mask = "[MASK]";
};

int cmd_score(const ScoreArgs& a, const Io& io) {
  const double tau = parse_tau(a.tau);
  const auto colon = a.scorer.find(':');
  const std::string kind = a.scorer.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : a.scorer.substr(colon + 1);
  if (arg.empty() || (kind != "uniform" && kind != "bigram" && kind != "external")) {
    throw UsageError("--scorer must be uniform:V, bigram:COUNTS or external:PATH");
  }
  MaskToken mask;
  try {
    mask = MaskToken(a.mask);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto samples = read_jsonl(fs::path(a.dataset));
  std::vector<fs::path> inputs{a.dataset};
  std::unique_ptr<MaskedScorer> scorer;
  std::unordered_map<std::string, std::vector<double>> external;
  if (kind == "uniform") {
    double v = 0;
    const auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
    if (ec != std::errc{} || p != arg.data() + arg.size() || !(v >= 1.0) || !std::isfinite(v)) {
      throw UsageError("uniform vocabulary size must be a number >= 1");
    }
    scorer = std::make_unique<UniformScorer>(v);
  } else if (kind == "bigram") {
    scorer = std::make_unique<BigramScorer>(BigramScorer::load(arg));
    inputs.emplace_back(arg);
  } else {
    inputs.emplace_back(arg);
    for (auto& rec : read_scores(arg)) external.emplace(rec.id, std::move(rec.scores));
    std::size_t missing = 0, wrong_size = 0;
    for (const auto& s : samples) {
      auto it = external.find(s.id);
      if (it == external.end()) ++missing;
      else if (it->second.size() != s.answers.size()) ++wrong_size;
    }
    const std::size_t unknown = external.size() - (samples.size() - missing);
    if (missing || wrong_size || unknown) {
      io.err << "khop: external scores do not match the dataset: " << missing << " missing, "
             << unknown << " unknown, " << wrong_size << " with the wrong candidate count\n";
      return 1;
    }
  }

  std::ofstream out(a.output, std::ios::binary);
  require_writable(out, a.output);
  Tally all;
  std::map<std::string, Tally> by_kind;
  for (const auto& s : samples) {
    Selection sel;
    if (scorer) {
      sel = select_answer(*scorer, s, mask);
    } else {
      sel.scores = external.at(s.id);
      sel.index = argmin(sel.scores);
    }
    const auto loss = sample_loss(sel.scores, s.correct_index, tau);
    ojson line;
    line["id"] = s.id;
    line["scores"] = sel.scores;
    line["predicted"] = sel.index;
    line["label"] = s.correct_index;
    line["loss"] = loss ? ojson(*loss) : ojson(nullptr);
    line["kind"] = to_string(s.kind);
    out << line.dump() << '\n';
    const bool hit = sel.index == s.correct_index;
    all.add(hit, loss);
    by_kind[std::string(to_string(s.kind))].add(hit, loss);
  }
  require_writable(out, a.output);
  out.close();

  ojson r = all.to_json();
  r["tau"] = tau;
  r["by_kind"] = ojson::object();
  for (const auto& [k, t] : by_kind) r["by_kind"][k] = t.to_json();
  ojson cfg;
  cfg["scorer"] = a.scorer;
  cfg["tau"] = tau;
  cfg["mask"] = a.mask;
  write_manifest(a.output, "score", cfg, inputs, r);
  print_report(io, r);
  return 0;
}

// --- evaluate ---

std::vector<double> parse_tau_grid(const std::string& spec) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const auto end = spec.find(':', start);
    const std::string piece = spec.substr(start, end == std::string::npos ? std::string::npos : end - start);
    double v = 0;
    const auto [p, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc{} || p != piece.data() + piece.size()) {
      throw UsageError("--tau-grid must look like start:stop:step");
    }
    parts.push_back(v);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (parts.size() != 3) throw UsageError("--tau-grid must look like start:stop:step");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(lo > 0) || !(hi >= lo) || !(step > 0) || !std::isfinite(hi)) {
    throw UsageError("--tau-grid needs 0 < start <= stop and step > 0");
  }
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    // Rounded so 0.1:1.0:0.1 lists 1.0 rather than 0.9999999999999999.
    const double t = std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12;
    if (t > hi + step * 1e-9) break;
    if (grid.size() == 10000) throw UsageError("--tau-grid has more than 10000 points");
    grid.push_back(t);
  }
  return grid;
}

struct EvaluateArgs {
  std::string scores;
  std::string dataset;
  double tau = kDefaultTemperature;
  std::string tau_grid;
};

int cmd_evaluate(const EvaluateArgs& a, const Io& io) {
  const double tau = parse_tau(a.tau);
  const std::vector<double> grid = a.tau_grid.empty() ? std::vector<double>{} : parse_tau_grid(a.tau_grid);
  auto records = read_scores(a.scores);
  std::vector<fs::path> inputs{a.scores};
  if (!a.dataset.empty()) {
    inputs.emplace_back(a.dataset);
    std::unordered_map<std::string, QASample> gold;
    for (auto& s : read_jsonl(fs::path(a.dataset))) gold.emplace(s.id, std::move(s));
    for (auto& rec : records) {
      auto it = gold.find(rec.id);
      if (it == gold.end()) throw std::runtime_error("id " + rec.id + " is not in " + a.dataset);
      if (it->second.answers.size() != rec.scores.size()) {
        throw std::runtime_error("id " + rec.id + " has the wrong number of scores");
      }
      rec.label = it->second.correct_index;
      rec.kind = std::string(to_string(it->second.kind));
    }
  }
  if (records.empty()) {
    io.err << "khop: nothing to evaluate in " << a.scores << '\n';
    return 1;
  }

  Tally all;
  std::map<std::string, Tally> by_kind;
  for (const auto& rec : records) {
    if (!rec.label) throw std::runtime_error("id " + rec.id + " has no label; pass --dataset");
    if (*rec.label >= rec.scores.size()) throw std::runtime_error("id " + rec.id + " has a label out of range");
    const bool hit = argmin(rec.scores) == *rec.label;
    const auto loss = sample_loss(rec.scores, *rec.label, tau);
    all.add(hit, loss);
    by_kind[rec.kind.value_or("unknown")].add(hit, loss);
  }

  ojson r = all.to_json();
  r["tau"] = tau;
  r["by_kind"] = ojson::object();
  for (const auto& [k, t] : by_kind) r["by_kind"][k] = t.to_json();
  if (!grid.empty()) {
    r["tau_grid"] = ojson::array();
    for (double t : grid) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& rec : records) {
        if (auto l = sample_loss(rec.scores, *rec.label, t)) {
          sum += *l;
          ++count;
        }
      }
      ojson row;
      row["tau"] = t;
      row["mean_loss"] = count ? ojson(sum / static_cast<double>(count)) : ojson(nullptr);
      r["tau_grid"].push_back(std::move(row));
    }
  }
  print_report(io, r);
  return 0;
}

// --- split / merge / stats / adapt / train-bigram ---

struct SplitArgs {
  std::string dataset, train, valid;
  double fraction = 0.95;
  std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& a, const Io& io) {
  if (!(a.fraction > 0.0 && a.fraction < 1.0)) throw UsageError("--fraction must lie in (0, 1)");
  auto samples = read_jsonl(fs::path(a.dataset));
  if (samples.size() < 2) {
    io.err << "khop: split needs at least 2 samples, " << a.dataset << " has " << samples.size() << '\n';
    return 1;
  }
  const auto parts = split(std::move(samples), {a.fraction, a.seed});
  write_jsonl(parts.train, fs::path(a.train));
  write_jsonl(parts.valid, fs::path(a.valid));
  ojson r;
  r["train"] = parts.train.size();
  r["valid"] = parts.valid.size();
  ojson cfg;
  cfg["fraction"] = a.fraction;
  cfg["seed"] = a.seed;
  write_manifest(a.train, "split", cfg, {a.dataset}, r);
  write_manifest(a.valid, "split", cfg, {a.dataset}, r);
  print_report(io, r);
  return 0;
}

struct MergeArgs {
  std::vector<std::string> inputs;
  std::vector<double> weights;
  std::string output;
  std::uint64_t seed = 0;
  bool dedup = false;
};

int cmd_merge(const MergeArgs& a, const Io& io) {
  if (!a.weights.empty() && a.weights.size() != a.inputs.size()) {
    throw UsageError("give one --weight per --input or none");
  }
  for (double w : a.weights) {
    if (!(w > 0.0 && w <= 1.0)) throw UsageError("--weight values must lie in (0, 1]");
  }
  const std::vector<fs::path> paths(a.inputs.begin(), a.inputs.end());
  auto merged = merge(paths, a.weights, a.seed);
  const std::size_t before = merged.size();
  if (a.dedup) merged = dedup(std::move(merged));
  write_jsonl(merged, fs::path(a.output));
  ojson r;
  r["samples"] = merged.size();
  r["duplicates_dropped"] = before - merged.size();
  ojson cfg;
  cfg["weights"] = a.weights;
  cfg["seed"] = a.seed;
  cfg["dedup"] = a.dedup;
  write_manifest(a.output, "merge", cfg, paths, r);
  print_report(io, r);
  return 0;
}

int cmd_stats(const std::string& dataset, const Io& io) {
  const auto samples = read_jsonl(fs::path(dataset));
  ojson r = to_json(stats(samples));
  // Generation counters travel in the manifest written next to the dataset.
  const fs::path manifest = dataset + ".manifest.json";
  if (std::ifstream in(manifest, std::ios::binary); in) {
    const auto m = ojson::parse(in, nullptr, false);
    if (!m.is_discarded() && m.value("command", "") == "generate" && m.contains("counters")) {
      r["generation"] = m["counters"]["generation"];
    }
  }
  print_report(io, r);
  return 0;
}

struct AdaptArgs {
  std::string input, format, output;
};

int cmd_adapt(const AdaptArgs& a, const Io& io) {
  BenchmarkFormat format;
  try {
    format = parse_benchmark_format(a.format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto samples = adapt_benchmark(fs::path(a.input), format);
  write_jsonl(samples, fs::path(a.output));
  ojson r;
  r["samples"] = samples.size();
  ojson cfg;
  cfg["format"] = a.format;
  write_manifest(a.output, "adapt", cfg, {a.input}, r);
  print_report(io, r);
  return 0;
}

struct TrainArgs {
  std::string dataset, output;
  std::string mask = "[MASK]";
};

int cmd_train_bigram(const TrainArgs& a, const Io& io) {
  MaskToken mask;
  try {
    mask = MaskToken(a.mask);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto samples = read_jsonl(fs::path(a.dataset));
  std::vector<TokenSequence> corpus;
  corpus.reserve(samples.size());
  for (const auto& s : samples) corpus.push_back(build_candidate_sequence(s, s.correct_index, mask));
  const auto model = BigramScorer::train(corpus);
  model.save(a.output);
  ojson r;
  r["sequences"] = corpus.size();
  r["vocab_size"] = model.vocab_size();
  ojson cfg;
  cfg["mask"] = a.mask;
  write_manifest(a.output, "train-bigram", cfg, {a.dataset}, r);
  print_report(io, r);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Io io{out, err};
  CLI::App app{"Multi-hop commonsense QA generation and scoring", "khop"};
  app.set_version_flag("--version", KHOP_VERSION);
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse a knowledge-graph dump into a graph cache");
  c_ingest->add_option("--input", ingest.input, "dump file, optionally gzip-compressed")->required();
  c_ingest->add_option("--output", ingest.output, "graph cache to write")->required();
  ingest.flags.add_to(*c_ingest);

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Generate multiple-choice QA samples");
  c_gen->add_option("--graph", gen.graph, "graph cache from `khop ingest`");
  c_gen->add_option("--input", gen.input, "raw dump, ingested on the fly");
  gen.flags.add_to(*c_gen);
  c_gen->add_option("--templates", gen.templates, "relation<TAB>pattern file");
  c_gen->add_option("--output", gen.output, "dataset JSONL to write")->required();
  c_gen->add_option("--seed", gen.seed, "random seed")->required();
  c_gen->add_option("--n", gen.n, "distractors per sample")->capture_default_str();
  c_gen->add_option("--max-per-key", gen.max_per_key, "samples per key entity, 0 for no cap")
      ->capture_default_str();
  c_gen->add_flag("--no-hard-negatives", gen.no_hard_negatives, "draw distractors at random");
  c_gen->add_flag("--no-compositive", gen.no_compositive, "skip compositive questions");
  c_gen->add_flag("--no-conjunctive", gen.no_conjunctive, "skip conjunctive questions");
  c_gen->add_flag("--no-single-hop", gen.no_single_hop, "skip single-hop questions");
  c_gen->add_option("--mask", gen.mask, "mask token")->capture_default_str();

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score every candidate answer of a dataset");
  c_score->add_option("--dataset", score.dataset, "dataset JSONL")->required();
  c_score->add_option("--scorer", score.scorer, "uniform:V, bigram:COUNTS or external:PATH")->required();
  c_score->add_option("--output", score.output, "scores JSONL to write")->required();
  c_score->add_option("--tau", score.tau, "InfoNCE temperature")->capture_default_str();
  c_score->add_option("--mask", score.mask, "mask token")->capture_default_str();

  EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "Accuracy and loss of a scores file");
  c_eval->add_option("--scores", eval.scores, "scores JSONL")->required();
  c_eval->add_option("--dataset", eval.dataset, "dataset supplying gold labels");
  c_eval->add_option("--tau", eval.tau, "InfoNCE temperature")->capture_default_str();
  c_eval->add_option("--tau-grid", eval.tau_grid, "start:stop:step temperature sweep");

  SplitArgs sp;
  auto* c_split = app.add_subcommand("split", "Shuffle a dataset into train and validation files");
  c_split->add_option("--dataset", sp.dataset)->required();
  c_split->add_option("--train", sp.train)->required();
  c_split->add_option("--valid", sp.valid)->required();
  c_split->add_option("--fraction", sp.fraction, "training fraction")->capture_default_str();
  c_split->add_option("--seed", sp.seed)->capture_default_str();

  MergeArgs mg;
  auto* c_merge = app.add_subcommand("merge", "Concatenate datasets, optionally subsampled");
  c_merge->add_option("--input", mg.inputs, "dataset JSONL (repeatable)")->required();
  c_merge->add_option("--weight", mg.weights, "fraction of each input to keep");
  c_merge->add_option("--output", mg.output)->required();
  c_merge->add_option("--seed", mg.seed)->capture_default_str();
  c_merge->add_flag("--dedup", mg.dedup, "drop repeated questions");

  std::string stats_dataset;
  auto* c_stats = app.add_subcommand("stats", "Summarize a dataset");
  c_stats->add_option("--dataset", stats_dataset)->required();

  AdaptArgs ad;
  auto* c_adapt = app.add_subcommand("adapt", "Convert a benchmark file to dataset JSONL");
  c_adapt->add_option("--input", ad.input)->required();
  c_adapt->add_option("--format", ad.format, "csqa or binary")->required();
  c_adapt->add_option("--output", ad.output)->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train-bigram", "Fit bigram counts on the correct answers");
  c_train->add_option("--dataset", tr.dataset)->required();
  c_train->add_option("--output", tr.output, "counts TSV to write")->required();
  c_train->add_option("--mask", tr.mask, "mask token")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest, io);
    if (c_gen->parsed()) return cmd_generate(gen, io);
    if (c_score->parsed()) return cmd_score(score, io);
    if (c_eval->parsed()) return cmd_evaluate(eval, io);
    if (c_split->parsed()) return cmd_split(sp, io);
    if (c_merge->parsed()) return cmd_merge(mg, io);
    if (c_stats->parsed()) return cmd_stats(stats_dataset, io);
    if (c_adapt->parsed()) return cmd_adapt(ad, io);
    if (c_train->parsed()) return cmd_train_bigram(tr, io);
  } catch (const UsageError& e) {
    err << "khop: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "khop: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace khop::cli
