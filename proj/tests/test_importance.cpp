#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hardneg/error.hpp"
#include "hardneg/importance.hpp"
#include "support.hpp"

using namespace hardneg;

namespace {

TokenMatrix tokens(Matrix m) { return TokenMatrix{std::move(m), {}}; }

SentenceVector unit_sentence(hardneg::Rng& rng, Eigen::Index dim) {
  Vector v = testing::random_matrix(rng, dim, 1).col(0);
  return SentenceVector{v / v.norm()};
}

std::vector<TokenMatrix> random_negatives(hardneg::Rng& rng, std::size_t k, Eigen::Index dim) {
  std::vector<TokenMatrix> out;
  for (std::size_t j = 0; j < k; ++j) {
    out.push_back(tokens(testing::unit_rows(testing::random_matrix(rng, 1 + rng.below(4), dim))));
  }
  return out;
}

// Direct evaluation with scalar loops.
Vector oracle_logits(const Vector& s, const std::vector<TokenMatrix>& negs, const ImportanceParams& p) {
  const Eigen::Index h = p.hidden();
  std::vector<double> q(h, 0.0);
  for (Eigen::Index c = 0; c < h; ++c)
    for (Eigen::Index d = 0; d < p.dim(); ++d) q[c] += p.wq(d, c) * s(d);
  Vector logits(static_cast<Eigen::Index>(negs.size()));
  for (std::size_t j = 0; j < negs.size(); ++j) {
    const Matrix& n = negs[j].rows;
    std::vector<double> score(n.rows(), 0.0);
    for (Eigen::Index t = 0; t < n.rows(); ++t) {
      for (Eigen::Index c = 0; c < h; ++c) {
        double key = 0.0;
        for (Eigen::Index d = 0; d < p.dim(); ++d) key += n(t, d) * p.wk(d, c);
        score[t] += key * q[c];
      }
      score[t] /= std::sqrt(static_cast<double>(h));
    }
    const double mx = *std::max_element(score.begin(), score.end());
    double den = 0.0;
    for (double& x : score) den += (x = std::exp(x - mx));
    double logit = 0.0;
    for (Eigen::Index c = 0; c < h; ++c) {
      double pooled = 0.0;
      for (Eigen::Index t = 0; t < n.rows(); ++t) {
        double val = 0.0;
        for (Eigen::Index d = 0; d < p.dim(); ++d) val += n(t, d) * p.wv(d, c);
        pooled += score[t] / den * val;
      }
      logit += pooled * p.womega(c);
    }
    logits(static_cast<Eigen::Index>(j)) = logit;
  }
  return logits;
}

}  // namespace

TEST_SUITE("importance") {
  TEST_CASE("pinned first row of the seeded init") {
    const ImportanceParams p = init_importance_params(8, 4, 0);
    testing::check_matrix(p.wq.row(0),
                          testing::rows({{0.27104167178996286, -0.048417017608423873, -0.33486189144781153,
                                          0.3329638398911078}}),
                          1e-16);
    CHECK(p.womega.size() == 4);
  }

  TEST_CASE("init determinism, seeding and errors") {
    const ImportanceParams a = init_importance_params(8, 4, 0);
    const ImportanceParams b = init_importance_params(8, 4, 0);
    CHECK(a.wq == b.wq);
    CHECK(a.womega == b.womega);
    CHECK(a.wq != init_importance_params(8, 4, 1).wq);
    CHECK(a.wv.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(8.0));
    CHECK_THROWS_AS(init_importance_params(0, 4, 0), ParameterError);
    CHECK_THROWS_AS(init_importance_params(8, 0, 0), ParameterError);
  }

  TEST_CASE("pinned omega for a three-negative instance") {
    const ImportanceParams p = init_importance_params(4, 2, 5);
    const SentenceVector s{Vector::Constant(4, 0.5)};
    const std::vector<TokenMatrix> negs{
        tokens(testing::rows({{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}})),
        tokens(testing::rows({{0.0, 0.0, 1.0, 0.0}})),
        tokens(testing::rows({{0.0, 0.0, 0.0, 1.0}, {0.6, 0.0, 0.8, 0.0}, {0.0, 0.8, 0.0, 0.6}}))};
    const ImportanceWeights w = estimate_weights(s, negs, p);
    testing::check_matrix(w.logits.transpose(),
                          testing::rows({{-0.00456898024479272, 0.23611940867960846, 0.16841575202405407}}), 1e-15);
    testing::check_matrix(w.omega.transpose(),
                          testing::rows({{0.2889361283290791, 0.36756274668913136, 0.3435011249817894}}), 1e-15);
  }

  TEST_CASE("random instances match the loop oracle and sum to one") {
    hardneg::Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
      const ImportanceParams p = init_importance_params(6, 3, 1000 + trial);
      const SentenceVector s = unit_sentence(rng, 6);
      const auto negs = random_negatives(rng, 1 + rng.below(5), 6);
      const ImportanceWeights w = estimate_weights(s, negs, p);
      const Vector want = oracle_logits(s.v, negs, p);
      CHECK((w.logits - want).cwiseAbs().maxCoeff() < 1e-12);
      CHECK_NEAR(w.omega.sum(), 1.0, 1e-6);
      CHECK(w.omega.minCoeff() > 0.0);
    }
  }

  TEST_CASE("k of one gives omega of exactly one") {
    hardneg::Rng rng(5);
    const ImportanceParams p = init_importance_params(6, 3, 2);
    const auto negs = random_negatives(rng, 1, 6);
    const ImportanceWeights w = estimate_weights(unit_sentence(rng, 6), negs, p);
    REQUIRE(w.omega.size() == 1);
    CHECK(w.omega(0) == 1.0);
  }

  TEST_CASE("identical negatives give uniform weights") {
    hardneg::Rng rng(6);
    const ImportanceParams p = init_importance_params(6, 3, 2);
    const auto one = random_negatives(rng, 1, 6);
    for (std::size_t k : {2u, 3u, 5u}) {
      const std::vector<TokenMatrix> negs(k, one[0]);
      const ImportanceWeights w = estimate_weights(unit_sentence(rng, 6), negs, p);
      for (Eigen::Index j = 0; j < w.omega.size(); ++j) CHECK_NEAR(w.omega(j), 1.0 / k, 1e-9);
    }
  }

  TEST_CASE("permuting negatives permutes omega") {
    hardneg::Rng rng(7);
    const ImportanceParams p = init_importance_params(6, 3, 9);
    const SentenceVector s = unit_sentence(rng, 6);
    auto negs = random_negatives(rng, 4, 6);
    const ImportanceWeights w = estimate_weights(s, negs, p);
    const std::vector<int> perm{2, 0, 3, 1};
    std::vector<TokenMatrix> permuted;
    for (int i : perm) permuted.push_back(negs[i]);
    const ImportanceWeights wp = estimate_weights(s, permuted, p);
    for (int j = 0; j < 4; ++j) CHECK_NEAR(wp.omega(j), w.omega(perm[j]), 1e-12);
  }

  TEST_CASE("shifting every logit leaves omega unchanged") {
    ad::Tape tape;
    const auto logits = tape.constant(testing::rows({{0.3, -1.2, 2.0}}));
    const auto shifted = tape.constant(testing::rows({{10.3, 8.8, 12.0}}));
    testing::check_matrix(ad::row_softmax(shifted).value(), ad::row_softmax(logits).value(), 1e-15);
  }

  TEST_CASE("input errors") {
    const ImportanceParams p = init_importance_params(4, 2, 0);
    const SentenceVector s{Vector::Constant(4, 0.5)};
    CHECK_THROWS_AS(estimate_weights(s, {}, p), InvalidInputError);
    const std::vector<TokenMatrix> bad{tokens(Matrix::Ones(1, 3))};
    CHECK_THROWS_AS(estimate_weights(s, bad, p), ShapeError);
    const std::vector<TokenMatrix> ok{tokens(Matrix::Ones(1, 4))};
    CHECK_THROWS_AS(estimate_weights(SentenceVector{Vector::Ones(3)}, ok, p), ShapeError);
  }

  TEST_CASE("gradient check") {
    hardneg::Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
      const ImportanceParams p = init_importance_params(8, 4, 200 + trial);
      ImportanceProbe probe{unit_sentence(rng, 8), random_negatives(rng, 2 + rng.below(4), 8), {}};
      probe.coefficients = testing::random_matrix(rng, static_cast<Eigen::Index>(probe.negatives.size()), 1).col(0);
      CHECK(grad_check(p, probe, 1e-5) < 1e-4);
    }
    CHECK_THROWS_AS(grad_check(init_importance_params(8, 4, 0), ImportanceProbe{}, 0.0), ParameterError);
  }
}
