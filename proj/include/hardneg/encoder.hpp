#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace hardneg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Word-level embedding: one row per token.
struct TokenMatrix {
  Matrix rows;
  std::vector<std::string> tokens;

  Eigen::Index size() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

struct SentenceVector {
  Vector v;
  Eigen::Index dim() const { return v.size(); }
};

// Synthetic video: one row per frame.
struct FrameMatrix {
  Matrix rows;
  Eigen::Index frames() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;
  virtual TokenMatrix embed_tokens(std::string_view text) const = 0;
  virtual SentenceVector embed_sentence(std::string_view text) const = 0;
  virtual Eigen::Index dim() const = 0;
  // Part of the embedding-cache key; zero for backends without a seed.
  virtual std::uint64_t seed() const { return 0; }
};

// Hash-based deterministic encoder.
//
// Text is split on whitespace; each token is lowercased and stripped of
// leading/trailing non-alphanumeric bytes (a token that is all punctuation
// keeps its lowercased form). The token's row is
//
//   key   = fnv1a64(token) ^ mix64(seed)
//   x_d   = mix64(key + (d + 1) * 0x9e3779b97f4a7c15)   for d in [0, dim)
//   row_d = 2 * (x_d >> 11) * 2^-53 - 1
//
// normalized to unit length. The sentence vector is the normalized mean of
// the token rows.
class ToyEncoder final : public EncoderBackend {
 public:
  explicit ToyEncoder(Eigen::Index dim = 16, std::uint64_t seed = 0);

  TokenMatrix embed_tokens(std::string_view text) const override;
  SentenceVector embed_sentence(std::string_view text) const override;
  Eigen::Index dim() const override { return dim_; }
  std::uint64_t seed() const override { return seed_; }

  // Unit row for a single already-normalized token.
  Vector token_row(std::string_view token) const;

  static std::string normalize_token(std::string_view raw);

 private:
  Eigen::Index dim_;
  std::uint64_t seed_;
};

// Splits on ASCII whitespace.
std::vector<std::string> whitespace_tokens(std::string_view text);

// One frame per slot: the normalized sum of the slot's token rows, plus
// noise_scale * N(0, 1) per entry drawn from a generator seeded with `seed`.
FrameMatrix embed_video_toy(const std::vector<std::string>& slots, double noise_scale, std::uint64_t seed,
                            const ToyEncoder& encoder);

// Sentence-vector cache keyed by (text, dim, seed). Persisted as
// line-delimited {text, dim, seed, vector}.
class EmbeddingCache {
 public:
  static EmbeddingCache load(const std::string& path);  // missing file -> empty cache
  void save(const std::string& path) const;

  const Vector* find(std::string_view text, Eigen::Index dim, std::uint64_t seed) const;
  void insert(std::string text, Eigen::Index dim, std::uint64_t seed, Vector v);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::tuple<std::string, Eigen::Index, std::uint64_t>, Vector, std::less<>> entries_;
};

// Routes sentence embeddings through an EmbeddingCache.
class CachedEncoder final : public EncoderBackend {
 public:
  CachedEncoder(const EncoderBackend& inner, EmbeddingCache& cache) : inner_(inner), cache_(cache) {}

  TokenMatrix embed_tokens(std::string_view text) const override { return inner_.embed_tokens(text); }
  SentenceVector embed_sentence(std::string_view text) const override;
  Eigen::Index dim() const override { return inner_.dim(); }
  std::uint64_t seed() const override { return inner_.seed(); }

 private:
  const EncoderBackend& inner_;
  EmbeddingCache& cache_;
  mutable std::mutex mu_;
};

}  // namespace hardneg
