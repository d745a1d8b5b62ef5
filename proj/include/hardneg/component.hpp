#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hardneg {

// Grammatical slot targeted when generating a hard negative. Declaration
// order is the canonical component order: importance weights and
// per-component losses are aligned by it.
enum class ComponentKind {
  Verb = 0,
  AdjectiveAdverb = 1,
  Subject = 2,
  Object = 3,
  NegatedPassive = 4,
};

inline constexpr std::array<ComponentKind, 5> kAllComponents = {
    ComponentKind::Verb, ComponentKind::AdjectiveAdverb, ComponentKind::Subject,
    ComponentKind::Object, ComponentKind::NegatedPassive};

// Lowercase tag used in files and on the command line ("verb",
// "adjective_adverb", "subject", "object", "negated_passive").
std::string_view component_tag(ComponentKind c);
std::optional<ComponentKind> parse_component(std::string_view tag);

// Parses a comma-separated list ("verb,object"); throws InvalidInputError on
// an unknown or duplicated tag. Result is sorted in canonical order.
std::vector<ComponentKind> parse_component_list(std::string_view csv);

// Sorts and de-duplicates in canonical order.
std::vector<ComponentKind> canonical_components(std::vector<ComponentKind> cs);

inline int component_index(ComponentKind c) { return static_cast<int>(c); }

}  // namespace hardneg
