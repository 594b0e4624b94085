#include "khop/ingest.h"

#include <zlib.h>

#include <array>
#include <cctype>
#include <charconv>
#include <memory>
#include <vector>

namespace khop {

std::string_view to_string(DumpFormat f) {
  switch (f) {
    case DumpFormat::kConceptNetCsv:
      return "conceptnet-csv";
    case DumpFormat::kGenericTsv:
      return "generic-tsv";
  }
  return "unknown";
}

DumpFormat parse_dump_format(std::string_view name) {
  if (name == "conceptnet-csv") return DumpFormat::kConceptNetCsv;
  if (name == "generic-tsv") return DumpFormat::kGenericTsv;
  throw std::invalid_argument("unknown dump format: " + std::string(name));
}

void IngestReport::count(const RowResult& r) {
  ++rows_read;
  if (std::holds_alternative<ParsedRow>(r)) {
    ++rows_kept;
    return;
  }
  switch (std::get<SkipReason>(r)) {
    case SkipReason::kLanguage:
      ++rows_skipped_language;
      break;
    case SkipReason::kWeight:
      ++rows_skipped_weight;
      break;
    case SkipReason::kRelation:
      ++rows_skipped_relation;
      break;
    case SkipReason::kMalformed:
      ++rows_malformed;
      break;
  }
}

namespace {

// Splits on tabs into at most N fields; returns the number found. The last
// field keeps any remaining tabs.
template <std::size_t N>
std::size_t split_tabs(std::string_view line, std::array<std::string_view, N>& out) {
  std::size_t n = 0;
  while (n + 1 < N) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) break;
    out[n++] = line.substr(0, tab);
    line.remove_prefix(tab + 1);
  }
  out[n++] = line;
  return n;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct ConceptUri {
  std::string_view language;
  std::string_view term;
};

// /c/<lang>/<term>[/pos[/...]]
std::optional<ConceptUri> parse_concept_uri(std::string_view uri) {
  constexpr std::string_view kPrefix = "/c/";
  if (!uri.starts_with(kPrefix)) return std::nullopt;
  uri.remove_prefix(kPrefix.size());
  const auto slash = uri.find('/');
  if (slash == std::string_view::npos || slash == 0) return std::nullopt;
  ConceptUri out{uri.substr(0, slash), uri.substr(slash + 1)};
  out.term = out.term.substr(0, out.term.find('/'));
  if (out.term.empty()) return std::nullopt;
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

RowResult keep_or_filter(std::string_view head, std::string_view rel, std::string_view tail,
                         double weight, const IngestConfig& config) {
  if (!(weight >= 0.0)) return SkipReason::kMalformed;
  ParsedRow row{normalize_entity(head), std::string(rel), normalize_entity(tail), weight};
  if (row.head.empty() || row.tail.empty() || row.relation.empty()) {
    return SkipReason::kMalformed;
  }
  if (config.excluded_relations.contains(row.relation)) return SkipReason::kRelation;
  if (weight < config.min_weight) return SkipReason::kWeight;
  return row;
}

}  // namespace

std::optional<double> json_weight(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  // Returns the index of the closing quote of the string starting at i.
  auto string_end = [&](std::size_t open) -> std::optional<std::size_t> {
    for (std::size_t j = open + 1; j < n; ++j) {
      if (s[j] == '\\') {
        ++j;
      } else if (s[j] == '"') {
        return j;
      }
    }
    return std::nullopt;
  };

  skip_ws();
  if (i >= n || s[i] != '{') return std::nullopt;
  ++i;
  int depth = 1;
  bool expect_key = true;
  while (i < n) {
    const char c = s[i];
    if (c == '"') {
      auto close = string_end(i);
      if (!close) return std::nullopt;
      const std::string_view text = s.substr(i + 1, *close - i - 1);
      i = *close + 1;
      if (depth == 1 && expect_key) {
        expect_key = false;
        skip_ws();
        if (i >= n || s[i] != ':') return std::nullopt;
        ++i;
        skip_ws();
        if (text == "weight") {
          std::size_t end = i;
          while (end < n && s[end] != ',' && s[end] != '}' &&
                 !std::isspace(static_cast<unsigned char>(s[end]))) {
            ++end;
          }
          return parse_number(s.substr(i, end - i));
        }
      }
      continue;
    }
    if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return std::nullopt;
    } else if (c == ',' && depth == 1) {
      expect_key = true;
    }
    ++i;
  }
  return std::nullopt;
}

RowResult parse_conceptnet_row(std::string_view line, const IngestConfig& config) {
  std::array<std::string_view, 5> f;
  if (split_tabs(line, f) < 5) return SkipReason::kMalformed;

  constexpr std::string_view kRelPrefix = "/r/";
  if (!f[1].starts_with(kRelPrefix) || f[1].size() == kRelPrefix.size()) {
    return SkipReason::kMalformed;
  }
  const std::string_view rel = f[1].substr(kRelPrefix.size());
  auto start = parse_concept_uri(f[2]);
  auto end = parse_concept_uri(f[3]);
  if (!start || !end) return SkipReason::kMalformed;
  if (!config.language.empty() &&
      (start->language != config.language || end->language != config.language)) {
    return SkipReason::kLanguage;
  }
  auto weight = json_weight(f[4]);
  if (!weight) return SkipReason::kMalformed;
  return keep_or_filter(start->term, rel, end->term, *weight, config);
}

RowResult parse_generic_row(std::string_view line, const IngestConfig& config) {
  std::array<std::string_view, 4> f;
  const std::size_t n = split_tabs(line, f);
  if (n < 3) return SkipReason::kMalformed;
  double weight = 1.0;
  if (n == 4) {
    auto w = parse_number(trim(f[3]));
    if (!w) return SkipReason::kMalformed;
    weight = *w;
  }
  return keep_or_filter(f[0], trim(f[1]), f[2], weight, config);
}

namespace {

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};

// Feeds each line (without terminator) to `fn`. gzread passes uncompressed
// input through unchanged, so one path serves both.
template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::unique_ptr<gzFile_s, GzCloser> file(gzopen(path.c_str(), "rb"));
  if (!file) throw IngestError("cannot open " + path.string());
  gzbuffer(file.get(), 1 << 20);

  std::vector<char> buf(1 << 20);
  std::string carry;
  for (;;) {
    const int got = gzread(file.get(), buf.data(), static_cast<unsigned>(buf.size()));
    if (got < 0) {
      int err = 0;
      throw IngestError("read error in " + path.string() + ": " + gzerror(file.get(), &err));
    }
    if (got == 0) break;
    std::string_view chunk(buf.data(), static_cast<std::size_t>(got));
    for (;;) {
      const auto nl = chunk.find('\n');
      if (nl == std::string_view::npos) {
        carry.append(chunk);
        break;
      }
      if (carry.empty()) {
        fn(chunk.substr(0, nl));
      } else {
        carry.append(chunk.substr(0, nl));
        fn(std::string_view(carry));
        carry.clear();
      }
      chunk.remove_prefix(nl + 1);
    }
  }
  if (!carry.empty()) fn(std::string_view(carry));
}

}  // namespace

std::pair<KnowledgeGraph, IngestReport> load(const std::filesystem::path& path,
                                             const IngestConfig& config) {
  if (!(config.min_weight >= 0.0)) throw std::invalid_argument("min_weight must be >= 0");
  if (std::error_code ec; !std::filesystem::is_regular_file(path, ec)) {
    throw IngestError("cannot open " + path.string());
  }
  const auto parse = config.format == DumpFormat::kConceptNetCsv ? parse_conceptnet_row
                                                                  : parse_generic_row;
  GraphBuilder builder;
  IngestReport report;
  for_each_line(path, [&](std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) return;
    RowResult r = parse(line, config);
    report.count(r);
    if (auto* row = std::get_if<ParsedRow>(&r)) {
      builder.add(Triple{builder.entity(row->head), builder.relation(row->relation),
                         builder.entity(row->tail), row->weight});
    }
  });
  return {std::move(builder).build(), report};
}

}  // namespace khop
