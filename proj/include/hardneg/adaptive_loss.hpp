#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "hardneg/autodiff.hpp"
#include "hardneg/component.hpp"
#include "hardneg/encoder.hpp"
#include "hardneg/importance.hpp"

namespace hardneg {

// How per-component losses become one sample loss.
enum class CombineMode {
  Simple,           // one contrastive loss over all negatives pooled
  MostDiscernable,  // minimum of the per-component losses
  Adaptive,         // importance-weighted sum of the per-component losses
};

std::string_view combine_mode_tag(CombineMode m);

// Similarities of the anchor to its positive and to each component's
// negatives, with the temperature they are scaled by.
struct SimilaritySet {
  double pos_sim = 0.0;
  std::map<ComponentKind, std::vector<double>> neg_sims;
  double tau = 0.07;
};

struct LossBreakdown {
  std::map<ComponentKind, double> per_component;  // canonical order
  double combined = 0.0;
  CombineMode mode = CombineMode::Simple;
};

// -log(e^{pos/tau} / (e^{pos/tau} + sum_n e^{n/tau})), evaluated as
// softplus(logsumexp_n((n - pos) / tau)).
double contrastive_loss(double pos_sim, std::span<const double> neg_sims, double tau);

// Contrastive loss for each component's negatives alone. `combined` is left
// at zero; see the combine functions.
LossBreakdown componentwise_losses(const SimilaritySet& sims);

// Contrastive loss with every component's negatives pooled.
double simple_loss(const SimilaritySet& sims);

// Smallest per-component loss. Ties go to the earliest component in
// canonical order; gradient flows only through that entry.
double min_combine(const LossBreakdown& b);
ComponentKind most_discernable(const LossBreakdown& b);

// sum_j omega_j * L_j, with omega aligned to per_component's canonical
// order.
double weighted_combine(const LossBreakdown& b, const Vector& omega);
inline double weighted_combine(const LossBreakdown& b, const ImportanceWeights& w) {
  return weighted_combine(b, w.omega);
}

// Per-component losses plus `combined` filled according to mode. omega is
// required for Adaptive.
LossBreakdown combine(const SimilaritySet& sims, CombineMode mode, const Vector* omega = nullptr);

// Symmetric cross-entropy over a B x B logit matrix whose diagonal holds the
// matched pairs: half of (mean row loss + mean column loss).
double auxiliary_positive_loss(const Matrix& logits);

// task + lambda * generated; lambda must be non-negative.
double total_loss(double task_loss, double generated_loss, double lambda = 1.0);

namespace ad {

// Tape forms of the above, for training. pos and each neg are 1x1.
Var contrastive_loss(const Var& pos, std::span<const Var> negs, double tau);
Var min_combine(std::span<const Var> losses);
// omega is 1 x k.
Var weighted_combine(const Var& omega, std::span<const Var> losses);
Var symmetric_cross_entropy(const Var& logits);

}  // namespace ad

}  // namespace hardneg
