#include "khop/templates.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "default_templates.h"

namespace khop {

namespace {

constexpr std::string_view kHead = "{head}";
constexpr std::string_view kTail = "{tail}";

std::size_t count_of(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string_view::npos;
       pos = s.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

TemplatePattern::TemplatePattern(std::string_view pattern) : text_(pattern) {
  if (count_of(pattern, kHead) != 1 || count_of(pattern, kTail) != 1) {
    throw TemplateError("pattern must contain {head} and {tail} exactly once: '" +
                        std::string(pattern) + "'");
  }
  const auto h = pattern.find(kHead);
  const auto t = pattern.find(kTail);
  head_first_ = h < t;
  const auto first = std::min(h, t);
  const auto second = std::max(h, t);
  before_ = lower(pattern.substr(0, first));
  between_ = lower(pattern.substr(first + kHead.size(), second - first - kHead.size()));
  after_ = lower(pattern.substr(second + kTail.size()));
}

std::string TemplatePattern::fill(std::string_view head, std::string_view tail) const {
  std::string out;
  out.reserve(before_.size() + between_.size() + after_.size() + head.size() + tail.size() + 1);
  out += before_;
  out += head_first_ ? head : tail;
  out += between_;
  out += head_first_ ? tail : head;
  out += after_;
  while (!out.empty() && out.back() == ' ') out.pop_back();
  if (out.empty() || out.back() != '.') out.push_back('.');
  return out;
}

std::string decamel(std::string_view relation) {
  std::string out;
  char prev = 0;
  for (char c : relation) {
    const auto uc = static_cast<unsigned char>(c);
    if (c == '_' || c == '/' || std::isspace(uc)) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      if (std::isupper(uc) && prev != 0 &&
          (std::islower(static_cast<unsigned char>(prev)) ||
           std::isdigit(static_cast<unsigned char>(prev))) &&
          out.back() != ' ') {
        out.push_back(' ');
      }
      out.push_back(static_cast<char>(std::tolower(uc)));
    }
    prev = c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

MaskToken::MaskToken(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw std::invalid_argument("mask token must be non-empty");
}

void validate_mask(const MaskToken& mask, const KnowledgeGraph& graph) {
  for (std::uint32_t i = 0; i < graph.entity_count(); ++i) {
    const std::string& s = graph.surface(EntityId{i});
    if (s.find(mask.text()) != std::string::npos) {
      throw TemplateError("mask token '" + mask.text() + "' occurs in entity '" + s + "'");
    }
  }
}

const TemplateTable& TemplateTable::conceptnet_default() {
  static const TemplateTable table = [] {
    std::istringstream in{std::string(kDefaultConceptNetTemplates)};
    return parse(in).table;
  }();
  return table;
}

TemplateTable::Loaded TemplateTable::parse(std::istream& in) {
  Loaded out;
  std::map<std::string, std::size_t, std::less<>> first_row;
  std::string line;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      out.rejects.push_back({row, "expected 'relation<TAB>pattern'"});
      continue;
    }
    std::string relation = line.substr(0, tab);
    if (auto it = first_row.find(relation); it != first_row.end()) {
      throw TemplateError("duplicate template for relation '" + relation + "' on rows " +
                          std::to_string(it->second) + " and " + std::to_string(row));
    }
    first_row.emplace(relation, row);
    try {
      out.table.set(std::move(relation), std::string_view(line).substr(tab + 1));
    } catch (const TemplateError& e) {
      out.rejects.push_back({row, e.what()});
    }
  }
  return out;
}

TemplateTable::Loaded TemplateTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot open template table " + path.string());
  return parse(in);
}

void TemplateTable::set(std::string relation, std::string_view pattern) {
  patterns_.insert_or_assign(std::move(relation), TemplatePattern(pattern));
}

bool TemplateTable::has(std::string_view relation) const {
  return patterns_.find(relation) != patterns_.end();
}

std::string TemplateTable::render(std::string_view head, std::string_view relation,
                                  std::string_view tail) const {
  if (auto it = patterns_.find(relation); it != patterns_.end()) {
    return it->second.fill(head, tail);
  }
  std::string fallback;
  fallback.append(head).append(" ").append(decamel(relation)).append(" ").append(tail);
  if (fallback.back() != '.') fallback.push_back('.');
  return fallback;
}

std::string render(const KnowledgeGraph& graph, const Triple& triple,
                   const TemplateTable& table) {
  return table.render(graph.surface(triple.head), graph.relation_name(triple.rel),
                      graph.surface(triple.tail));
}

std::string render_masked(const KnowledgeGraph& graph, const Triple& triple, EntityId masked,
                          const TemplateTable& table, const MaskToken& mask) {
  if (masked != triple.head && masked != triple.tail) {
    throw std::invalid_argument("masked entity is not part of the triple");
  }
  const std::string_view head =
      triple.head == masked ? std::string_view(mask.text()) : graph.surface(triple.head);
  const std::string_view tail =
      triple.tail == masked ? std::string_view(mask.text()) : graph.surface(triple.tail);
  return table.render(head, graph.relation_name(triple.rel), tail);
}

}  // namespace khop
