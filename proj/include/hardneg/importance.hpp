#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hardneg/autodiff.hpp"
#include "hardneg/encoder.hpp"

namespace hardneg {

// Cross-attention importance estimator: wq, wk, wv are dim x h, womega has
// length h. No biases.
struct ImportanceParams {
  Matrix wq, wk, wv;
  Vector womega;

  Eigen::Index dim() const { return wq.rows(); }
  Eigen::Index hidden() const { return wq.cols(); }
};

struct ImportanceWeights {
  Vector logits;  // one per negative
  Vector omega;   // softmax(logits)
};

// Entries uniform on [-1/sqrt(dim), 1/sqrt(dim)], drawn for wq, wk, wv
// (row-major) and then womega.
ImportanceParams init_importance_params(Eigen::Index dim, Eigen::Index h, std::uint64_t seed);

// For each negative j: query = wq^T * sentence, keys/values are the
// negative's token rows times wk/wv, attention is softmax over tokens of
// key.query / sqrt(h), V'_j is the attention-weighted value average and
// logit_j = womega . V'_j. omega = softmax over j.
ImportanceWeights estimate_weights(const SentenceVector& sentence, std::span<const TokenMatrix> negatives,
                                   const ImportanceParams& params);

namespace ad {

struct ImportanceVars {
  Var wq, wk, wv, womega;  // womega is h x 1
};

ImportanceVars record(Tape& tape, const ImportanceParams& p, bool trainable = true);

// 1 x k logits. sentence is 1 x dim; each negative is tok x dim.
Var importance_logits(const ImportanceVars& p, const Var& sentence, std::span<const Var> negatives);

// 1 x k softmax weights.
inline Var importance_weights(const ImportanceVars& p, const Var& sentence, std::span<const Var> negatives) {
  return row_softmax(importance_logits(p, sentence, negatives));
}

}  // namespace ad

struct ImportanceProbe {
  SentenceVector sentence;
  std::vector<TokenMatrix> negatives;
  Vector coefficients;  // c_j of the scalar probe sum_j c_j * omega_j
};

// Largest relative error between tape gradients and central differences of
// the probe with respect to every entry of wq, wk, wv and womega.
double grad_check(const ImportanceParams& params, const ImportanceProbe& probe, double step);

}  // namespace hardneg
