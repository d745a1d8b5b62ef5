#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hardneg/component.hpp"

namespace hardneg {

// Appended to the anchor when a rule finds nothing to change.
inline constexpr std::string_view kUnchangedMarker = " [unchanged]";

inline bool is_unchanged(std::string_view text) { return text.ends_with(kUnchangedMarker); }

enum class LexCategory { Verb, Adj, Subj, Obj };

std::string_view category_tag(LexCategory c);
std::optional<LexCategory> parse_category(std::string_view tag);

struct LexiconEntry {
  std::string surface;  // matched case-insensitively
  LexCategory category;
  std::string replacement;
  std::optional<std::string> participle;  // verbs only; used by passive rules

  bool operator==(const LexiconEntry&) const = default;
};

// Word-substitution table backing the offline generator. A surface may appear
// under several categories; lookups are keyed by (category, lowercase
// surface).
class Lexicon {
 public:
  Lexicon() = default;  // unloaded

  explicit Lexicon(std::vector<LexiconEntry> entries);

  // Shipped demo lexicon (identical to data/demo_lexicon.jsonl); covers the
  // toy benchmark vocabulary.
  static const Lexicon& demo();

  // Line-delimited records {surface, category, replacement, participle?}.
  static Lexicon load(const std::string& path);

  bool loaded() const { return loaded_; }
  const LexiconEntry* find(LexCategory c, std::string_view word) const;
  const std::vector<LexiconEntry>& entries() const { return entries_; }

 private:
  std::vector<LexiconEntry> entries_;
  std::map<std::pair<LexCategory, std::string>, std::size_t> index_;
  bool loaded_ = false;
};

// Deterministic rule-based rewrite standing in for the LLM. Substitution
// components replace the first word whose lexicon category matches;
// NegatedPassive rewrites "S V O." as "O is/are not V-participle by S.".
// Returns anchor + kUnchangedMarker when no rule applies. Throws
// ConfigurationError if the lexicon is not loaded.
std::string fallback_transform(std::string_view anchor, ComponentKind component, const Lexicon& lexicon);

// Voice alteration "S V O." -> "O is/are being V-participle by S.", used as
// the offline positive.
std::string fallback_positive(std::string_view anchor, const Lexicon& lexicon);

}  // namespace hardneg
