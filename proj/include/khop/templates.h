#ifndef KHOP_TEMPLATES_H_
#define KHOP_TEMPLATES_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "khop/graph.h"

namespace khop {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A relation pattern with exactly one {head} and one {tail} slot. Literal
// text is stored lowercased.
class TemplatePattern {
 public:
  // Throws TemplateError unless both placeholders occur exactly once.
  explicit TemplatePattern(std::string_view pattern);

  // Fills the slots verbatim and terminates the sentence with a period.
  std::string fill(std::string_view head, std::string_view tail) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  // Literal pieces around the two slots: before, between, after.
  std::string before_, between_, after_;
  bool head_first_ = true;
};

// "AtLocation" -> "at location". Underscores and slashes become spaces too.
std::string decamel(std::string_view relation);

class MaskToken {
 public:
  MaskToken() = default;
  explicit MaskToken(std::string text);
  const std::string& text() const { return text_; }

 private:
  std::string text_ = "[MASK]";
};

// Throws TemplateError when the mask text occurs inside any entity surface.
void validate_mask(const MaskToken& mask, const KnowledgeGraph& graph);

struct TemplateReject {
  std::size_t row = 0;  // 1-based line number
  std::string reason;
};

class TemplateTable {
 public:
  struct Loaded;

  TemplateTable() = default;

  // The ConceptNet table shipped in data/conceptnet_templates.tsv.
  static const TemplateTable& conceptnet_default();

  // Rows are "relation \t pattern". Rows with a broken placeholder set are
  // collected as rejects; a repeated relation throws TemplateError naming
  // both rows.
  static Loaded parse(std::istream& in);
  static Loaded load(const std::filesystem::path& path);

  void set(std::string relation, std::string_view pattern);
  bool has(std::string_view relation) const;
  std::size_t size() const { return patterns_.size(); }

  // Sentence for the relation with the given slot text; unknown relations use
  // "{head} <decamelled relation> {tail}".
  std::string render(std::string_view head, std::string_view relation,
                     std::string_view tail) const;

 private:
  std::map<std::string, TemplatePattern, std::less<>> patterns_;
};

struct TemplateTable::Loaded {
  TemplateTable table;
  std::vector<TemplateReject> rejects;
};

std::string render(const KnowledgeGraph& graph, const Triple& triple,
                   const TemplateTable& table);

// Renders with every slot holding `masked` replaced by the mask text. Throws
// std::invalid_argument when `masked` is neither head nor tail.
std::string render_masked(const KnowledgeGraph& graph, const Triple& triple, EntityId masked,
                          const TemplateTable& table, const MaskToken& mask = {});

}  // namespace khop

#endif  // KHOP_TEMPLATES_H_
