#include "hardneg/fine_similarity.hpp"

#include <algorithm>
#include <cmath>

#include "hardneg/error.hpp"

namespace hardneg {

namespace {

// softmax(x / tau) . x, stable.
double attend(const Eigen::Ref<const Eigen::RowVectorXd>& x, double tau) {
  const double m = x.maxCoeff();
  const Eigen::RowVectorXd w = ((x.array() - m) / tau).exp();
  // A weighted mean; clamp away rounding outside [min, max].
  return std::clamp((w.array() * x.array()).sum() / w.sum(), x.minCoeff(), m);
}

double two_stage(const Matrix& m, double tau) {
  Eigen::RowVectorXd rows(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows(i) = attend(m.row(i), tau);
  return attend(rows, tau);
}

}  // namespace

SimilarityMatrix similarity_matrix(const TokenMatrix& a, const TokenMatrix& b, double tau) {
  if (a.dim() != b.dim()) throw ShapeError("similarity_matrix: token dimensions differ");
  if (a.size() == 0 || b.size() == 0) throw ShapeError("similarity_matrix: empty token matrix");
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  return SimilarityMatrix{a.rows * b.rows.transpose(), tau};
}

double side_score(const SimilarityMatrix& s, Side side) {
  if (!(s.tau > 0.0)) throw ParameterError("tau must be positive");
  if (s.m.size() == 0) throw ShapeError("side_score: empty matrix");
  return side == Side::A ? two_stage(s.m, s.tau) : two_stage(s.m.transpose(), s.tau);
}

PairScore pair_score(const TokenMatrix& a, const TokenMatrix& b, double tau) {
  const SimilarityMatrix s = similarity_matrix(a, b, tau);
  PairScore p;
  p.side_a = side_score(s, Side::A);
  p.side_b = side_score(s, Side::B);
  p.final = (p.side_a + p.side_b) / 2.0;
  return p;
}

double cosine(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw ShapeError("cosine: dimensions differ");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw UndefinedSimilarityError("cosine of a zero vector is undefined");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

}  // namespace hardneg
