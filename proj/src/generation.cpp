#include "hardneg/generation.hpp"

#include <atomic>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

#include "hardneg/rng.hpp"

namespace hardneg {

namespace {

std::string describe(const std::vector<ComponentFailure>& failures) {
  std::string out;
  for (const auto& f : failures) {
    if (!out.empty()) out += "; ";
    out += f.component ? std::string(component_tag(*f.component)) : std::string("positive");
    out += ": " + f.reason;
  }
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

GenerationError::GenerationError(std::string anchor, std::vector<ComponentFailure> failures)
    : Error("generation failed for \"" + anchor + "\": " + describe(failures)),
      anchor_(std::move(anchor)),
      failures_(std::move(failures)) {}

std::string derive_bundle_id(std::string_view anchor) { return fmt::format("b{:016x}", fnv1a64(anchor)); }

std::vector<Caption> load_captions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open captions file '" + path + "'");
  std::vector<Caption> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, "<record>", e.what());
    }
    Caption c;
    if (j.is_string()) {
      c.text = j.get<std::string>();
    } else if (j.is_object()) {
      const char* key = j.contains("text") ? "text" : "anchor";
      if (!j.contains(key) || !j[key].is_string()) throw ParseError(lineno, "text", "missing or not a string");
      c.text = j[key].get<std::string>();
      if (j.contains("id")) {
        if (!j["id"].is_string()) throw ParseError(lineno, "id", "not a string");
        c.id = j["id"].get<std::string>();
      }
    } else {
      throw ParseError(lineno, "<record>", "expected a string or an object");
    }
    if (c.text.empty()) throw ParseError(lineno, "text", "empty");
    if (c.id.empty()) c.id = derive_bundle_id(c.text);
    out.push_back(std::move(c));
  }
  return out;
}

SampleForge::SampleForge(const PromptCatalog& catalog, GenerationBackend* backend, const Lexicon* fallback)
    : catalog_(catalog), backend_(backend), fallback_(fallback) {
  if (!backend_ && !(fallback_ && fallback_->loaded())) {
    throw ConfigurationError("no generation backend and no fallback lexicon");
  }
}

std::optional<std::string> SampleForge::ask(const PromptMessages& prompt, std::string_view anchor,
                                            std::string& reason) const {
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      std::string reply = trim(backend_->complete(prompt));
      if (reply.empty()) {
        reason = "empty reply";
      } else if (reply == anchor) {
        reason = "reply echoes the anchor";
      } else {
        return reply;
      }
    } catch (const BackendError& e) {
      reason = e.what();
    }
  }
  return std::nullopt;
}

TextBundle SampleForge::generate_bundle(std::string id, std::string_view anchor,
                                        std::span<const ComponentKind> components) const {
  if (anchor.empty()) throw InvalidInputError("anchor text is empty");
  if (components.empty()) throw InvalidInputError("no components requested");

  const bool have_fallback = fallback_ && fallback_->loaded();
  auto guard_echo = [&](std::string text) {
    return text == anchor ? std::string(anchor) + std::string(kUnchangedMarker) : text;
  };

  TextBundle b;
  b.id = std::move(id);
  b.anchor = std::string(anchor);
  std::vector<ComponentFailure> failures;

  for (ComponentKind c : canonical_components({components.begin(), components.end()})) {
    std::string reason = "no backend";
    if (backend_) {
      if (auto reply = ask(catalog_.build_negative_prompt(anchor, c), anchor, reason)) {
        b.negatives[c] = std::move(*reply);
        b.provenance[c] = Provenance::Llm;
        continue;
      }
    }
    if (have_fallback) {
      b.negatives[c] = guard_echo(fallback_transform(anchor, c, *fallback_));
      b.provenance[c] = Provenance::Fallback;
    } else {
      failures.push_back({c, reason});
    }
  }

  std::string reason = "no backend";
  std::optional<std::string> positive;
  if (backend_) positive = ask(catalog_.build_positive_prompt(anchor), anchor, reason);
  if (positive) {
    b.positive = std::move(*positive);
  } else if (have_fallback) {
    b.positive = guard_echo(fallback_positive(anchor, *fallback_));
  } else {
    failures.push_back({std::nullopt, reason});
  }

  if (!failures.empty()) throw GenerationError(b.anchor, std::move(failures));
  return b;
}

std::vector<TextBundle> SampleForge::generate_all(std::span<const Caption> captions,
                                                  std::span<const ComponentKind> components,
                                                  std::size_t parallelism) const {
  if (parallelism == 0) throw ParameterError("parallelism must be at least 1");
  std::vector<TextBundle> out(captions.size());
  std::vector<std::exception_ptr> errors(captions.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < captions.size(); i = next++) {
      try {
        out[i] = generate_bundle(captions[i].id, captions[i].text, components);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::min(parallelism, captions.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace hardneg
