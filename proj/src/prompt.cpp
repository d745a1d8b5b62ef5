#include "hardneg/prompt.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "hardneg/error.hpp"

namespace hardneg {

namespace {

PromptMessages instantiate(const PromptTemplate& t, std::string_view anchor) {
  if (anchor.empty()) throw InvalidInputError("anchor text is empty");
  return PromptMessages{t.system, t.exemplar_user, t.exemplar_assistant, std::string(anchor)};
}

}  // namespace

const PromptCatalog& PromptCatalog::builtin() {
  static const PromptCatalog catalog = [] {
    PromptCatalog c;
    c.negatives_[component_index(ComponentKind::Verb)] = {
        "Change the verb of the sentence",
        "A woman drives a car on a Greek island.",
        "A woman washes a car on a Greek island."};
    c.negatives_[component_index(ComponentKind::AdjectiveAdverb)] = {
        "Change the adjective or adverb of the sentence",
        "A tall man climbs a rocky hill.",
        "A short man climbs a rocky hill."};
    c.negatives_[component_index(ComponentKind::Subject)] = {
        "Change the subject of the sentence",
        "A woman goes for a drive in a Greek island.",
        "A dog goes for a drive in a Greek island."};
    c.negatives_[component_index(ComponentKind::Object)] = {
        "Change the object of the sentence",
        "A woman goes for a drive in a Greek island.",
        "A woman goes for a drive in Sahara desert."};
    c.negatives_[component_index(ComponentKind::NegatedPassive)] = {
        "Convert the sentence to negated passive voice",
        "The chef cooks a meal.",
        "A meal is not cooked by the chef."};
    c.positive_ = {"Alter voice of the sentence", "The chef cooks a meal.",
                   "A meal is being cooked by the chef."};
    return c;
  }();
  return catalog;
}

PromptCatalog PromptCatalog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open prompt catalog '" + path + "'");
  PromptCatalog c;
  std::array<bool, 5> seen{};
  bool seen_positive = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, "<record>", e.what());
    }
    auto field = [&](const char* name) {
      if (!j.contains(name) || !j[name].is_string()) throw ParseError(lineno, name, "missing or not a string");
      return j[name].get<std::string>();
    };
    const std::string tag = field("component");
    PromptTemplate t{field("system"), field("exemplar_user"), field("exemplar_assistant")};
    if (tag == "positive") {
      c.positive_ = std::move(t);
      seen_positive = true;
    } else if (auto kind = parse_component(tag)) {
      c.negatives_[component_index(*kind)] = std::move(t);
      seen[component_index(*kind)] = true;
    } else {
      throw ParseError(lineno, "component", "unknown component '" + tag + "'");
    }
  }
  for (ComponentKind k : kAllComponents) {
    if (!seen[component_index(k)]) {
      throw ConfigurationError("prompt catalog lacks component '" + std::string(component_tag(k)) + "'");
    }
  }
  if (!seen_positive) throw ConfigurationError("prompt catalog lacks the positive template");
  return c;
}

PromptMessages PromptCatalog::build_negative_prompt(std::string_view anchor, ComponentKind c) const {
  return instantiate(negative(c), anchor);
}

PromptMessages PromptCatalog::build_positive_prompt(std::string_view anchor) const {
  return instantiate(positive_, anchor);
}

PromptMessages build_negative_prompt(std::string_view anchor, ComponentKind c) {
  return PromptCatalog::builtin().build_negative_prompt(anchor, c);
}

PromptMessages build_positive_prompt(std::string_view anchor) {
  return PromptCatalog::builtin().build_positive_prompt(anchor);
}

}  // namespace hardneg
