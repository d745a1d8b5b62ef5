#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardneg/bundle.hpp"
#include "hardneg/error.hpp"
#include "hardneg/lexicon.hpp"
#include "hardneg/prompt.hpp"

namespace hardneg {

// Text generator answering one-shot prompts. Implementations must be safe to
// call from several threads at once.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  // Returns the assistant reply; throws BackendError on failure.
  virtual std::string complete(const PromptMessages& prompt) = 0;
};

// A component (or the positive, when component is empty) that could not be
// generated.
struct ComponentFailure {
  std::optional<ComponentKind> component;
  std::string reason;
};

class GenerationError : public Error {
 public:
  GenerationError(std::string anchor, std::vector<ComponentFailure> failures);
  const std::vector<ComponentFailure>& failures() const { return failures_; }
  const std::string& anchor() const { return anchor_; }

 private:
  std::string anchor_;
  std::vector<ComponentFailure> failures_;
};

struct Caption {
  std::string id;
  std::string text;
};

// Reads captions: one JSON record per line, either a string or an object
// with "text" (or "anchor") and optional "id". Missing ids are derived from
// a hash of the text.
std::vector<Caption> load_captions(const std::string& path);

// Stable id for an anchor without one.
std::string derive_bundle_id(std::string_view anchor);

// Generates bundles through an LLM backend with the lexicon fallback.
//
// Each requested output is asked for at most twice; an empty reply or one
// equal to the anchor counts as a miss, as does a BackendError. After two
// misses the lexicon rule is used and provenance is recorded as fallback.
// Without a lexicon the miss is reported in a GenerationError listing every
// failed component. With no backend at all, every output comes straight
// from the lexicon.
class SampleForge {
 public:
  SampleForge(const PromptCatalog& catalog, GenerationBackend* backend, const Lexicon* fallback);

  TextBundle generate_bundle(std::string id, std::string_view anchor,
                             std::span<const ComponentKind> components) const;

  // Runs generate_bundle over every caption with at most `parallelism`
  // requests in flight. Output order follows input order.
  std::vector<TextBundle> generate_all(std::span<const Caption> captions, std::span<const ComponentKind> components,
                                       std::size_t parallelism = 4) const;

 private:
  std::optional<std::string> ask(const PromptMessages& prompt, std::string_view anchor, std::string& reason) const;

  const PromptCatalog& catalog_;
  GenerationBackend* backend_;
  const Lexicon* fallback_;
};

}  // namespace hardneg
