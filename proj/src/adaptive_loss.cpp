#include "hardneg/adaptive_loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardneg/error.hpp"

namespace hardneg {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_tau(double tau) {
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
}

}  // namespace

std::string_view combine_mode_tag(CombineMode m) {
  switch (m) {
    case CombineMode::Simple:
      return "simple";
    case CombineMode::MostDiscernable:
      return "most_discernable";
    case CombineMode::Adaptive:
      return "adaptive";
  }
  return "unknown";
}

double contrastive_loss(double pos_sim, std::span<const double> neg_sims, double tau) {
  check_tau(tau);
  if (neg_sims.empty()) throw InvalidInputError("contrastive loss needs at least one negative");
  double m = -std::numeric_limits<double>::infinity();
  for (double n : neg_sims) m = std::max(m, (n - pos_sim) / tau);
  double acc = 0.0;
  for (double n : neg_sims) acc += std::exp((n - pos_sim) / tau - m);
  return softplus(m + std::log(acc));
}

LossBreakdown componentwise_losses(const SimilaritySet& sims) {
  check_tau(sims.tau);
  if (sims.neg_sims.empty()) throw InvalidInputError("no negatives");
  LossBreakdown b;
  for (const auto& [c, negs] : sims.neg_sims) {
    if (negs.empty()) {
      throw InvalidInputError("component '" + std::string(component_tag(c)) + "' has no negatives");
    }
    b.per_component[c] = contrastive_loss(sims.pos_sim, negs, sims.tau);
  }
  return b;
}

double simple_loss(const SimilaritySet& sims) {
  std::vector<double> pooled;
  for (const auto& [c, negs] : sims.neg_sims) pooled.insert(pooled.end(), negs.begin(), negs.end());
  return contrastive_loss(sims.pos_sim, pooled, sims.tau);
}

ComponentKind most_discernable(const LossBreakdown& b) {
  if (b.per_component.empty()) throw InvalidInputError("empty loss breakdown");
  auto best = b.per_component.begin();
  for (auto it = b.per_component.begin(); it != b.per_component.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  return best->first;
}

double min_combine(const LossBreakdown& b) { return b.per_component.at(most_discernable(b)); }

double weighted_combine(const LossBreakdown& b, const Vector& omega) {
  if (static_cast<std::size_t>(omega.size()) != b.per_component.size()) {
    throw ShapeError("importance weights and per-component losses differ in length");
  }
  double acc = 0.0;
  Eigen::Index j = 0;
  for (const auto& [c, loss] : b.per_component) acc += omega(j++) * loss;
  return acc;
}

LossBreakdown combine(const SimilaritySet& sims, CombineMode mode, const Vector* omega) {
  LossBreakdown b = componentwise_losses(sims);
  b.mode = mode;
  switch (mode) {
    case CombineMode::Simple:
      b.combined = simple_loss(sims);
      break;
    case CombineMode::MostDiscernable:
      b.combined = min_combine(b);
      break;
    case CombineMode::Adaptive:
      if (!omega) throw InvalidInputError("adaptive combination needs importance weights");
      b.combined = weighted_combine(b, *omega);
      break;
  }
  return b;
}

double auxiliary_positive_loss(const Matrix& logits) {
  if (logits.rows() != logits.cols()) throw ShapeError("auxiliary loss needs a square matrix");
  if (logits.rows() < 1) throw ShapeError("auxiliary loss needs a non-empty matrix");
  const Eigen::Index n = logits.rows();
  auto lse = [](const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    const double m = x.maxCoeff();
    return m + std::log((x.array() - m).exp().sum());
  };
  double rows = 0.0, cols = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    rows += lse(logits.row(i)) - logits(i, i);
    cols += lse(logits.col(i).transpose()) - logits(i, i);
  }
  return 0.5 * (rows / static_cast<double>(n) + cols / static_cast<double>(n));
}

double total_loss(double task_loss, double generated_loss, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  return task_loss + lambda * generated_loss;
}

namespace ad {

Var contrastive_loss(const Var& pos, std::span<const Var> negs, double tau) {
  check_tau(tau);
  if (negs.empty()) throw InvalidInputError("contrastive loss needs at least one negative");
  std::vector<Var> logits;
  logits.reserve(negs.size() + 1);
  logits.push_back(pos);
  logits.insert(logits.end(), negs.begin(), negs.end());
  const Var row = scale(assemble(logits, 1, static_cast<Eigen::Index>(logits.size())), 1.0 / tau);
  return sub(logsumexp(row), scale(pos, 1.0 / tau));
}

Var min_combine(std::span<const Var> losses) {
  if (losses.empty()) throw InvalidInputError("empty loss breakdown");
  std::size_t best = 0;
  for (std::size_t i = 1; i < losses.size(); ++i) {
    if (losses[i].scalar() < losses[best].scalar()) best = i;
  }
  // Route through a 1x1 identity so the result is its own node.
  return scale(losses[best], 1.0);
}

Var weighted_combine(const Var& omega, std::span<const Var> losses) {
  if (omega.rows() != 1 || omega.cols() != static_cast<Eigen::Index>(losses.size())) {
    throw ShapeError("importance weights and per-component losses differ in length");
  }
  const Var column = assemble(losses, static_cast<Eigen::Index>(losses.size()), 1);
  return matmul(omega, column);
}

Var symmetric_cross_entropy(const Var& logits) {
  if (logits.rows() != logits.cols() || logits.rows() < 1) throw ShapeError("auxiliary loss needs a square matrix");
  const double n = static_cast<double>(logits.rows());
  const Var diag_sum = sum(diagonal(logits));
  const Var row_terms = sum(row_logsumexp(logits));
  const Var col_terms = sum(row_logsumexp(transpose(logits)));
  const Var total = sub(add(row_terms, col_terms), scale(diag_sum, 2.0));
  return scale(total, 0.5 / n);
}

}  // namespace ad

}  // namespace hardneg
