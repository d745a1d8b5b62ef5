#include "hardneg/encoder.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hardneg/error.hpp"
#include "hardneg/rng.hpp"

namespace hardneg {

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

ToyEncoder::ToyEncoder(Eigen::Index dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 1) throw ParameterError("encoder dim must be at least 1");
}

std::string ToyEncoder::normalize_token(std::string_view raw) {
  std::string lowered(raw);
  for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  std::size_t b = 0, e = lowered.size();
  while (b < e && !alnum(lowered[b])) ++b;
  while (e > b && !alnum(lowered[e - 1])) --e;
  if (b == e) return lowered;
  return lowered.substr(b, e - b);
}

Vector ToyEncoder::token_row(std::string_view token) const {
  const std::uint64_t key = fnv1a64(token) ^ mix64(seed_);
  Vector row(dim_);
  for (Eigen::Index d = 0; d < dim_; ++d) {
    const std::uint64_t x = mix64(key + static_cast<std::uint64_t>(d + 1) * 0x9e3779b97f4a7c15ULL);
    row(d) = 2.0 * static_cast<double>(x >> 11) * 0x1.0p-53 - 1.0;
  }
  return row / row.norm();
}

TokenMatrix ToyEncoder::embed_tokens(std::string_view text) const {
  const auto raw = whitespace_tokens(text);
  if (raw.empty()) throw InvalidInputError("cannot embed empty text");
  TokenMatrix m;
  m.rows.resize(static_cast<Eigen::Index>(raw.size()), dim_);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    m.tokens.push_back(normalize_token(raw[i]));
    m.rows.row(static_cast<Eigen::Index>(i)) = token_row(m.tokens.back()).transpose();
  }
  return m;
}

SentenceVector ToyEncoder::embed_sentence(std::string_view text) const {
  const TokenMatrix m = embed_tokens(text);
  Vector mean = m.rows.colwise().mean().transpose();
  const double n = mean.norm();
  if (!(n > 0.0)) throw InvalidInputError("sentence embedding has zero norm");
  return SentenceVector{mean / n};
}

FrameMatrix embed_video_toy(const std::vector<std::string>& slots, double noise_scale, std::uint64_t seed,
                            const ToyEncoder& encoder) {
  if (slots.empty()) throw InvalidInputError("video needs at least one slot");
  if (!(noise_scale >= 0.0)) throw ParameterError("noise_scale must be non-negative");
  Rng rng(seed);
  FrameMatrix video;
  video.rows.resize(static_cast<Eigen::Index>(slots.size()), encoder.dim());
  for (std::size_t f = 0; f < slots.size(); ++f) {
    const TokenMatrix words = encoder.embed_tokens(slots[f]);
    Vector frame = words.rows.colwise().sum().transpose();
    const double n = frame.norm();
    if (n > 0.0) frame /= n;
    for (Eigen::Index d = 0; d < frame.size(); ++d) frame(d) += noise_scale * rng.normal();
    video.rows.row(static_cast<Eigen::Index>(f)) = frame.transpose();
  }
  return video;
}

EmbeddingCache EmbeddingCache::load(const std::string& path) {
  EmbeddingCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, "<record>", e.what());
    }
    for (const char* f : {"text", "dim", "seed", "vector"}) {
      if (!j.contains(f)) throw ParseError(lineno, f, "missing");
    }
    if (!j["text"].is_string()) throw ParseError(lineno, "text", "not a string");
    if (!j["vector"].is_array()) throw ParseError(lineno, "vector", "not an array");
    const auto values = j["vector"].get<std::vector<double>>();
    const auto dim = j["dim"].get<Eigen::Index>();
    if (static_cast<Eigen::Index>(values.size()) != dim) throw ParseError(lineno, "vector", "length differs from dim");
    cache.insert(j["text"].get<std::string>(), dim, j["seed"].get<std::uint64_t>(),
                 Eigen::Map<const Vector>(values.data(), dim));
  }
  return cache;
}

void EmbeddingCache::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigurationError("cannot write embedding cache '" + path + "'");
  for (const auto& [key, v] : entries_) {
    nlohmann::ordered_json j;
    j["text"] = std::get<0>(key);
    j["dim"] = std::get<1>(key);
    j["seed"] = std::get<2>(key);
    j["vector"] = std::vector<double>(v.data(), v.data() + v.size());
    out << j.dump() << '\n';
  }
}

const Vector* EmbeddingCache::find(std::string_view text, Eigen::Index dim, std::uint64_t seed) const {
  auto it = entries_.find(std::make_tuple(std::string(text), dim, seed));
  return it == entries_.end() ? nullptr : &it->second;
}

void EmbeddingCache::insert(std::string text, Eigen::Index dim, std::uint64_t seed, Vector v) {
  entries_.insert_or_assign(std::make_tuple(std::move(text), dim, seed), std::move(v));
}

SentenceVector CachedEncoder::embed_sentence(std::string_view text) const {
  {
    std::lock_guard lock(mu_);
    if (const Vector* hit = cache_.find(text, inner_.dim(), inner_.seed())) return SentenceVector{*hit};
  }
  SentenceVector s = inner_.embed_sentence(text);
  std::lock_guard lock(mu_);
  cache_.insert(std::string(text), inner_.dim(), inner_.seed(), s.v);
  return s;
}

}  // namespace hardneg
