#include "hardneg/importance.hpp"

#include <cmath>

#include "hardneg/error.hpp"
#include "hardneg/gradcheck.hpp"
#include "hardneg/rng.hpp"

namespace hardneg {

ImportanceParams init_importance_params(Eigen::Index dim, Eigen::Index h, std::uint64_t seed) {
  if (dim < 1 || h < 1) throw ParameterError("importance dims must be at least 1");
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  auto draw = [&] {
    Matrix m(dim, h);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < h; ++c) m(r, c) = rng.uniform(-bound, bound);
    return m;
  };
  ImportanceParams p;
  p.wq = draw();
  p.wk = draw();
  p.wv = draw();
  p.womega.resize(h);
  for (Eigen::Index i = 0; i < h; ++i) p.womega(i) = rng.uniform(-bound, bound);
  return p;
}

namespace ad {

ImportanceVars record(Tape& tape, const ImportanceParams& p, bool trainable) {
  auto leaf = [&](const Matrix& m) { return trainable ? tape.variable(m) : tape.constant(m); };
  return ImportanceVars{leaf(p.wq), leaf(p.wk), leaf(p.wv), leaf(Matrix(p.womega))};
}

Var importance_logits(const ImportanceVars& p, const Var& sentence, std::span<const Var> negatives) {
  if (negatives.empty()) throw InvalidInputError("importance estimation needs at least one negative");
  if (sentence.rows() != 1 || sentence.cols() != p.wq.rows()) {
    throw ShapeError("sentence vector does not match importance parameters");
  }
  const double inv_sqrt_h = 1.0 / std::sqrt(static_cast<double>(p.wq.cols()));
  const Var query = matmul(sentence, p.wq);  // (wq^T s)^T
  std::vector<Var> logits;
  logits.reserve(negatives.size());
  for (const Var& n : negatives) {
    if (n.cols() != p.wq.rows()) throw ShapeError("negative token dim does not match importance parameters");
    const Var keys = matmul(n, p.wk);
    const Var values = matmul(n, p.wv);
    const Var attn = row_softmax(scale(matmul(query, transpose(keys)), inv_sqrt_h));
    const Var pooled = matmul(attn, values);  // 1 x h
    logits.push_back(matmul(pooled, p.womega));
  }
  return assemble(logits, 1, static_cast<Eigen::Index>(logits.size()));
}

}  // namespace ad

ImportanceWeights estimate_weights(const SentenceVector& sentence, std::span<const TokenMatrix> negatives,
                                   const ImportanceParams& params) {
  if (negatives.empty()) throw InvalidInputError("importance estimation needs at least one negative");
  ad::Tape tape;
  const auto p = ad::record(tape, params, false);
  std::vector<ad::Var> neg;
  for (const TokenMatrix& n : negatives) neg.push_back(tape.constant(n.rows));
  const ad::Var logits = ad::importance_logits(p, tape.constant(sentence.v.transpose()), neg);
  const ad::Var omega = ad::row_softmax(logits);
  return ImportanceWeights{logits.value().row(0).transpose(), omega.value().row(0).transpose()};
}

double grad_check(const ImportanceParams& params, const ImportanceProbe& probe, double step) {
  if (!(step > 0.0)) throw ParameterError("finite-difference step must be positive");
  if (probe.coefficients.size() != static_cast<Eigen::Index>(probe.negatives.size())) {
    throw ShapeError("probe coefficients must match the number of negatives");
  }
  ad::Tape tape;
  const auto vars = ad::record(tape, params, true);
  std::vector<ad::Var> neg;
  for (const TokenMatrix& n : probe.negatives) neg.push_back(tape.constant(n.rows));
  const ad::Var omega = ad::importance_weights(vars, tape.constant(probe.sentence.v.transpose()), neg);
  const ad::Var out = ad::matmul(omega, tape.constant(probe.coefficients));
  tape.backward(out);

  ImportanceParams p = params;
  auto f = [&] { return estimate_weights(probe.sentence, probe.negatives, p).omega.dot(probe.coefficients); };
  double worst = 0.0;
  worst = std::max(worst, max_relative_error(p.wq, vars.wq.grad(), step, f));
  worst = std::max(worst, max_relative_error(p.wk, vars.wk.grad(), step, f));
  worst = std::max(worst, max_relative_error(p.wv, vars.wv.grad(), step, f));
  Matrix womega = p.womega;
  auto g = [&] {
    p.womega = womega;
    return f();
  };
  worst = std::max(worst, max_relative_error(womega, vars.womega.grad(), step, g));
  p.womega = womega;
  return worst;
}

}  // namespace hardneg
