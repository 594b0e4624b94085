#ifndef KHOP_INGEST_H_
#define KHOP_INGEST_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "khop/graph.h"

namespace khop {

enum class DumpFormat { kConceptNetCsv, kGenericTsv };

std::string_view to_string(DumpFormat f);
// Accepts "conceptnet-csv" and "generic-tsv".
DumpFormat parse_dump_format(std::string_view name);

struct IngestConfig {
  DumpFormat format = DumpFormat::kConceptNetCsv;
  std::string language = "en";  // ConceptNet only; matched on the URI segment
  double min_weight = 1.0;
  std::set<std::string, std::less<>> excluded_relations;
};

enum class SkipReason { kLanguage, kWeight, kRelation, kMalformed };

// A kept row: normalized surfaces, ready for GraphBuilder::add.
struct ParsedRow {
  std::string head;
  std::string relation;
  std::string tail;
  double weight = 1.0;
};

using RowResult = std::variant<ParsedRow, SkipReason>;

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_skipped_language = 0;
  std::size_t rows_skipped_weight = 0;
  std::size_t rows_skipped_relation = 0;
  std::size_t rows_malformed = 0;

  void count(const RowResult& r);
  bool balanced() const {
    return rows_read == rows_kept + rows_skipped_language + rows_skipped_weight +
                            rows_skipped_relation + rows_malformed;
  }
};

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One ConceptNet 5.x assertion row: assertion URI, /r/Rel, /c/<lang>/<term>/...,
// /c/<lang>/<term>/..., JSON metadata with a numeric "weight".
RowResult parse_conceptnet_row(std::string_view line, const IngestConfig& config);
// "head \t relation \t tail [\t weight]"; weight defaults to 1.0.
RowResult parse_generic_row(std::string_view line, const IngestConfig& config);

// Extracts the numeric top-level "weight" member of a JSON object, without
// materializing the document.
std::optional<double> json_weight(std::string_view json);

// Reads a dump, plain or gzip-compressed. Throws IngestError when the file
// cannot be opened; bad rows are only counted.
std::pair<KnowledgeGraph, IngestReport> load(const std::filesystem::path& path,
                                             const IngestConfig& config);

}  // namespace khop

#endif  // KHOP_INGEST_H_
