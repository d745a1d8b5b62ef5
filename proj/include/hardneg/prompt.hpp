#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "hardneg/component.hpp"

namespace hardneg {

// One-shot chat prompt: system instruction, one worked example as a
// user/assistant exchange, then the query. Sent to the model in exactly this
// order.
struct PromptMessages {
  std::string system;
  std::string exemplar_user;
  std::string exemplar_assistant;
  std::string query_user;

  struct Message {
    std::string_view role;
    std::string_view content;
  };
  std::array<Message, 4> messages() const {
    return {{{"system", system},
             {"user", exemplar_user},
             {"assistant", exemplar_assistant},
             {"user", query_user}}};
  }

  bool operator==(const PromptMessages&) const = default;
};

// Instruction and worked example for one kind of rewrite.
struct PromptTemplate {
  std::string system;
  std::string exemplar_user;
  std::string exemplar_assistant;

  bool operator==(const PromptTemplate&) const = default;
};

// Per-component negative templates plus the voice-alteration template used
// for positives.
class PromptCatalog {
 public:
  // The shipped catalog (identical to data/prompt_catalog.jsonl).
  static const PromptCatalog& builtin();

  // Reads line-delimited records {component, system, exemplar_user,
  // exemplar_assistant}. The component "positive" selects the positive
  // template. Every component and the positive must be present.
  static PromptCatalog load(const std::string& path);

  const PromptTemplate& negative(ComponentKind c) const { return negatives_[component_index(c)]; }
  const PromptTemplate& positive() const { return positive_; }

  PromptMessages build_negative_prompt(std::string_view anchor, ComponentKind c) const;
  PromptMessages build_positive_prompt(std::string_view anchor) const;

  bool operator==(const PromptCatalog&) const = default;

 private:
  std::array<PromptTemplate, 5> negatives_;
  PromptTemplate positive_;
};

// Free-function forms against the builtin catalog.
PromptMessages build_negative_prompt(std::string_view anchor, ComponentKind c);
PromptMessages build_positive_prompt(std::string_view anchor);

}  // namespace hardneg
