#include "hardneg/bundle.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hardneg/error.hpp"
#include "hardneg/lexicon.hpp"

namespace hardneg {

using ordered_json = nlohmann::ordered_json;

std::string_view provenance_tag(Provenance p) { return p == Provenance::Llm ? "llm" : "fallback"; }

std::vector<ComponentKind> TextBundle::applicable_components() const {
  std::vector<ComponentKind> out;
  for (const auto& [c, text] : negatives) {
    if (!is_unchanged(text)) out.push_back(c);
  }
  return out;
}

std::string bundle_to_json_line(const TextBundle& b) {
  ordered_json j;
  j["id"] = b.id;
  j["anchor"] = b.anchor;
  j["positive"] = b.positive;
  ordered_json neg = ordered_json::object();
  ordered_json prov = ordered_json::object();
  for (const auto& [c, text] : b.negatives) neg[std::string(component_tag(c))] = text;
  for (const auto& [c, p] : b.provenance) prov[std::string(component_tag(c))] = std::string(provenance_tag(p));
  j["negatives"] = std::move(neg);
  j["provenance"] = std::move(prov);
  return j.dump();
}

TextBundle bundle_from_json_line(std::string_view line, std::size_t lineno) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(lineno, "<record>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(lineno, "<record>", "record is not an object");

  auto text = [&](const char* name) {
    if (!j.contains(name)) throw ParseError(lineno, name, "missing");
    if (!j[name].is_string()) throw ParseError(lineno, name, "not a string");
    return j[name].get<std::string>();
  };

  TextBundle b;
  b.id = text("id");
  b.anchor = text("anchor");
  b.positive = text("positive");

  for (const char* name : {"negatives", "provenance"}) {
    if (!j.contains(name)) throw ParseError(lineno, name, "missing");
    if (!j[name].is_object()) throw ParseError(lineno, name, "not an object");
  }
  for (const auto& [key, value] : j["negatives"].items()) {
    auto c = parse_component(key);
    if (!c) throw ParseError(lineno, "negatives." + key, "unknown component");
    if (!value.is_string()) throw ParseError(lineno, "negatives." + key, "not a string");
    b.negatives[*c] = value.get<std::string>();
  }
  for (const auto& [key, value] : j["provenance"].items()) {
    auto c = parse_component(key);
    if (!c) throw ParseError(lineno, "provenance." + key, "unknown component");
    if (!value.is_string()) throw ParseError(lineno, "provenance." + key, "not a string");
    const std::string p = value.get<std::string>();
    if (p == "llm") {
      b.provenance[*c] = Provenance::Llm;
    } else if (p == "fallback") {
      b.provenance[*c] = Provenance::Fallback;
    } else {
      throw ParseError(lineno, "provenance." + key, "expected \"llm\" or \"fallback\"");
    }
  }
  if (b.negatives.empty()) throw ParseError(lineno, "negatives", "empty");
  for (const auto& [c, t] : b.negatives) {
    if (!b.provenance.contains(c)) {
      throw ParseError(lineno, "provenance." + std::string(component_tag(c)), "missing");
    }
  }
  if (b.provenance.size() != b.negatives.size()) {
    throw ParseError(lineno, "provenance", "keys differ from negatives");
  }
  return b;
}

std::size_t store_bundles(const std::string& path, const std::vector<TextBundle>& bundles) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigurationError("cannot open '" + path + "' for writing");
  for (const TextBundle& b : bundles) out << bundle_to_json_line(b) << '\n';
  out.flush();
  if (!out) throw ConfigurationError("write to '" + path + "' failed");
  return bundles.size();
}

std::vector<TextBundle> load_bundles(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open '" + path + "' for reading");
  std::vector<TextBundle> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(bundle_from_json_line(line, lineno));
  }
  return out;
}

BundleAppender::BundleAppender(std::string path) : path_(std::move(path)) {}

void BundleAppender::append(const TextBundle& b) {
  const std::string record = bundle_to_json_line(b) + "\n";
  std::lock_guard lock(mu_);
  std::FILE* f = std::fopen(path_.c_str(), "ab");
  if (!f) throw ConfigurationError("cannot open '" + path_ + "' for appending");
  const std::size_t n = std::fwrite(record.data(), 1, record.size(), f);
  const bool ok = n == record.size() && std::fflush(f) == 0;
  std::fclose(f);
  if (!ok) throw ConfigurationError("append to '" + path_ + "' failed");
}

}  // namespace hardneg
