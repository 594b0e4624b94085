#ifndef KHOP_DATASET_H_
#define KHOP_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "khop/generate.h"
#include "khop/sample.h"

namespace khop {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSONL record, keys in this order:
//   {"id","question","answers","label","kind","provenance":[[h,r,t],...]}
std::string to_json_line(const QASample& sample);
QASample from_json_line(std::string_view line);

void write_jsonl(std::span<const QASample> samples, std::ostream& out);
void write_jsonl(std::span<const QASample> samples, const std::filesystem::path& path);
// Errors carry "<source>:<line>". Repeated ids are an error.
std::vector<QASample> read_jsonl(std::istream& in, std::string_view source = "<stream>");
std::vector<QASample> read_jsonl(const std::filesystem::path& path);

// Drops samples whose (question, sorted answers, correct answer) was already
// seen. Order is otherwise preserved.
std::vector<QASample> dedup(std::vector<QASample> samples);

struct SplitConfig {
  double train_fraction = 0.95;
  std::uint64_t seed = 0;
  void validate() const;
};

struct SplitResult {
  std::vector<QASample> train;
  std::vector<QASample> valid;
};

// Seeded uniform shuffle; |train| = round(f * N) clamped to [1, N - 1] so both
// sides are non-empty. Throws std::invalid_argument when N < 2.
SplitResult split(std::vector<QASample> samples, const SplitConfig& config);
std::size_t train_size(std::size_t n, double train_fraction);

// Concatenates the inputs. A weight w in (0, 1] keeps round(w * count) samples
// of that input, chosen by seeded sampling and kept in file order. Ids that
// collide with an earlier input are re-hashed with the input's position.
std::vector<QASample> merge(std::span<const std::filesystem::path> paths,
                            std::span<const double> weights = {}, std::uint64_t seed = 0);

enum class BenchmarkFormat { kCsqa, kBinaryChoice };
BenchmarkFormat parse_benchmark_format(std::string_view name);

// CSQA: question.stem, question.choices[].label/text, answerKey.
// Binary choice (PIQA-style): goal, sol1, sol2, label.
std::vector<QASample> adapt_benchmark(std::istream& in, BenchmarkFormat format,
                                      std::string_view source = "<stream>");
std::vector<QASample> adapt_benchmark(const std::filesystem::path& path,
                                      BenchmarkFormat format);

struct DatasetStats {
  std::size_t samples = 0;
  std::map<std::string, std::size_t> by_kind;
  std::map<std::size_t, std::size_t> answer_counts;  // |answers| -> samples
  std::size_t distinct_entities = 0;
  double mean_question_words = 0.0;
  std::optional<GenStats> generation;
};

DatasetStats stats(std::span<const QASample> samples);

nlohmann::ordered_json to_json(const KindStats& s);
nlohmann::ordered_json to_json(const GenStats& s);
nlohmann::ordered_json to_json(const DatasetStats& s);

}  // namespace khop

#endif  // KHOP_DATASET_H_
