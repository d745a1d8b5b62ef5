#pragma once

#include "hardneg/encoder.hpp"

namespace hardneg {

inline constexpr double kDefaultTau = 0.07;

// Token-pair dot products of two texts: m(i, j) = a_i . b_j.
struct SimilarityMatrix {
  Matrix m;
  double tau = kDefaultTau;
};

struct PairScore {
  double side_a = 0.0;
  double side_b = 0.0;
  double final = 0.0;  // (side_a + side_b) / 2
};

enum class Side { A, B };

SimilarityMatrix similarity_matrix(const TokenMatrix& a, const TokenMatrix& b, double tau = kDefaultTau);

// Two-stage softmax-weighted pooling at temperature tau. For side A each row
// i of m is first pooled over b's tokens,
//   r_i = sum_j softmax_j(m(i, j) / tau) * m(i, j),
// then the r_i are pooled the same way over a's tokens. Side B applies the
// same to the transpose. Softmaxes subtract the max before exponentiating.
double side_score(const SimilarityMatrix& s, Side side);

PairScore pair_score(const TokenMatrix& a, const TokenMatrix& b, double tau = kDefaultTau);

// Throws UndefinedSimilarityError for a zero vector, ShapeError on a length
// mismatch.
double cosine(const Vector& u, const Vector& v);

}  // namespace hardneg
