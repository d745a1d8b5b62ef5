#include "hardneg/component.hpp"

#include <algorithm>

#include "hardneg/error.hpp"

namespace hardneg {

std::string_view component_tag(ComponentKind c) {
  switch (c) {
    case ComponentKind::Verb:
      return "verb";
    case ComponentKind::AdjectiveAdverb:
      return "adjective_adverb";
    case ComponentKind::Subject:
      return "subject";
    case ComponentKind::Object:
      return "object";
    case ComponentKind::NegatedPassive:
      return "negated_passive";
  }
  return "unknown";
}

std::optional<ComponentKind> parse_component(std::string_view tag) {
  for (ComponentKind c : kAllComponents) {
    if (component_tag(c) == tag) return c;
  }
  return std::nullopt;
}

std::vector<ComponentKind> canonical_components(std::vector<ComponentKind> cs) {
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  return cs;
}

std::vector<ComponentKind> parse_component_list(std::string_view csv) {
  std::vector<ComponentKind> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string_view::npos) comma = csv.size();
    std::string_view item = csv.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    auto c = parse_component(item);
    if (!c) throw InvalidInputError("unknown component tag '" + std::string(item) + "'");
    if (std::find(out.begin(), out.end(), *c) != out.end()) {
      throw InvalidInputError("duplicate component tag '" + std::string(item) + "'");
    }
    out.push_back(*c);
    start = comma + 1;
  }
  return canonical_components(std::move(out));
}

}  // namespace hardneg
