#include <doctest.h>

#include <cmath>

#include "hardneg/adaptive_loss.hpp"
#include "hardneg/error.hpp"
#include "hardneg/gradcheck.hpp"
#include "support.hpp"

using namespace hardneg;

namespace {

const std::vector<double> kOne{0.5};

SimilaritySet three_components() {
  SimilaritySet s;
  s.pos_sim = 0.5;
  s.tau = 0.1;
  s.neg_sims[ComponentKind::Verb] = {0.6};
  s.neg_sims[ComponentKind::Subject] = {0.3};
  s.neg_sims[ComponentKind::Object] = {0.45, 0.55};
  return s;
}

LossBreakdown breakdown(std::vector<double> values) {
  LossBreakdown b;
  for (std::size_t i = 0; i < values.size(); ++i) b.per_component[kAllComponents[i]] = values[i];
  return b;
}

}  // namespace

TEST_SUITE("adaptive_loss") {
  TEST_CASE("closed-form contrastive values") {
    for (double tau : {1e-3, 0.07, 1.0}) {
      CHECK_NEAR(contrastive_loss(0.5, kOne, tau), std::log(2.0), 1e-9);
      const std::vector<double> four(4, 0.5);
      CHECK_NEAR(contrastive_loss(0.5, four, tau), std::log(5.0), 1e-9);
    }
    const std::vector<double> n{0.9};
    CHECK_NEAR(contrastive_loss(0.8, n, 0.07), 1.6434013463573345, 1e-14);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(contrastive_loss(0.5, {}, 0.07), InvalidInputError);
    CHECK_THROWS_AS(contrastive_loss(0.5, kOne, 0.0), ParameterError);
    SimilaritySet s = three_components();
    s.neg_sims[ComponentKind::NegatedPassive] = {};
    CHECK_THROWS_WITH_AS(componentwise_losses(s), doctest::Contains("negated_passive"), InvalidInputError);
    CHECK_THROWS_AS(min_combine(LossBreakdown{}), InvalidInputError);
    CHECK_THROWS_AS(weighted_combine(breakdown({1.0, 2.0}), Vector::Ones(3) / 3.0), ShapeError);
    CHECK_THROWS_AS(auxiliary_positive_loss(Matrix::Zero(2, 3)), ShapeError);
    CHECK_THROWS_AS(total_loss(1.0, 1.0, -0.1), ParameterError);
    CHECK_THROWS_AS(combine(three_components(), CombineMode::Adaptive), InvalidInputError);
  }

  TEST_CASE("pinned three-component instance") {
    const SimilaritySet s = three_components();
    const LossBreakdown b = componentwise_losses(s);
    REQUIRE(b.per_component.size() == 3);
    CHECK_NEAR(b.per_component.at(ComponentKind::Verb), 1.3132616875182221, 1e-14);
    CHECK_NEAR(b.per_component.at(ComponentKind::Subject), 0.12692801104297238, 1e-14);
    CHECK_NEAR(b.per_component.at(ComponentKind::Object), 1.1802696706417346, 1e-14);
    CHECK_NEAR(simple_loss(s), 1.8097416565592215, 1e-14);
    CHECK_NEAR(combine(s, CombineMode::Simple).combined, 1.8097416565592215, 1e-14);
    CHECK(combine(s, CombineMode::MostDiscernable).combined == b.per_component.at(ComponentKind::Subject));
    CHECK(most_discernable(b) == ComponentKind::Subject);
    const Vector w = (Vector(3) << 0.2, 0.5, 0.3).finished();
    CHECK_NEAR(combine(s, CombineMode::Adaptive, &w).combined, 0.6801972442176509, 1e-14);
  }

  TEST_CASE("degenerate decompositions") {
    SimilaritySet s;
    s.pos_sim = 0.2;
    s.tau = 0.07;
    s.neg_sims[ComponentKind::Object] = {0.1, 0.4};
    const LossBreakdown b = componentwise_losses(s);
    CHECK(b.per_component.at(ComponentKind::Object) == contrastive_loss(0.2, s.neg_sims[ComponentKind::Object], 0.07));
    s.neg_sims[ComponentKind::Verb] = {0.1, 0.4};
    const LossBreakdown c = componentwise_losses(s);
    CHECK(c.per_component.at(ComponentKind::Verb) == c.per_component.at(ComponentKind::Object));
  }

  TEST_CASE("combination rules") {
    CHECK(min_combine(breakdown({0.3, 0.7, 0.5})) == 0.3);
    CHECK(min_combine(breakdown({0.9})) == 0.9);
    CHECK(most_discernable(breakdown({0.4, 0.4, 0.4})) == ComponentKind::Verb);
    CHECK_NEAR(weighted_combine(breakdown({1.0, 2.0, 3.0}), (Vector(3) << 0.5, 0.3, 0.2).finished()), 1.7, 1e-15);
    CHECK_NEAR(weighted_combine(breakdown({1.0, 2.0, 6.0}), Vector::Constant(3, 1.0 / 3.0)), 3.0, 1e-15);
    CHECK(weighted_combine(breakdown({1.0, 2.0, 6.0}), (Vector(3) << 0.0, 1.0, 0.0).finished()) == 2.0);
  }

  TEST_CASE("auxiliary positive loss") {
    CHECK(auxiliary_positive_loss(Matrix::Constant(1, 1, 3.0)) == 0.0);
    CHECK_NEAR(auxiliary_positive_loss(Matrix::Constant(4, 4, 0.3)), std::log(4.0), 1e-9);
    CHECK_NEAR(auxiliary_positive_loss(testing::rows({{2.0, 0.5}, {1.0, 3.0}})), 0.18012317770912434, 1e-15);
  }

  TEST_CASE("total loss") {
    CHECK(total_loss(0.7, 5.0, 0.0) == 0.7);
    CHECK(total_loss(0.5, 0.5) == 1.0);
    CHECK_NEAR(total_loss(1.25, 2.0, 0.3), 1.85, 1e-15);
  }

  TEST_CASE("contrastive loss monotonicity and positivity") {
    const std::vector<std::pair<double, std::vector<double>>> cases{
        {0.8, {0.9}}, {0.1, {0.3, -0.2, 0.5}}, {-0.4, {-0.5, -0.9}}, {0.99, {0.98, 0.97, 0.2}}};
    const double eps = 1e-3;
    for (const auto& [pos, negs] : cases) {
      const double base = contrastive_loss(pos, negs, 0.07);
      CHECK(base > 0.0);
      CHECK(contrastive_loss(pos + eps, negs, 0.07) < base);
      for (std::size_t i = 0; i < negs.size(); ++i) {
        auto up = negs;
        up[i] += eps;
        CHECK(contrastive_loss(pos, up, 0.07) > base);
      }
    }
  }

  TEST_CASE("single-negative loss grows as temperature falls") {
    const std::vector<double> n{0.6};
    double previous = 0.0;
    for (double tau : {2.0, 1.0, 0.5, 0.2, 0.1, 0.07, 0.03, 0.01, 0.003, 0.001}) {
      const double l = contrastive_loss(0.5, n, tau);
      CHECK_NEAR(l, std::log1p(std::exp(0.1 / tau)), 1e-9 * std::max(1.0, l));
      CHECK(l > previous);
      previous = l;
    }
  }

  TEST_CASE("no overflow at the smallest temperature") {
    hardneg::Rng rng(3);
    for (int t = 0; t < 200; ++t) {
      std::vector<double> negs(1 + rng.below(6));
      for (double& x : negs) x = rng.uniform(-1.0, 1.0);
      const double l = contrastive_loss(rng.uniform(-1.0, 1.0), negs, 1e-3);
      CHECK(std::isfinite(l));
      CHECK(l >= 0.0);  // underflows to zero when the positive dominates
    }
  }

  TEST_CASE("weighted combination stays within min and max") {
    hardneg::Rng rng(99);
    for (int t = 0; t < 1000; ++t) {
      const std::size_t k = 1 + rng.below(5);
      std::vector<double> ls(k);
      for (double& x : ls) x = rng.uniform(0.0, 5.0);
      Vector w(static_cast<Eigen::Index>(k));
      for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = rng.uniform(0.0, 1.0) + 1e-9;
      w /= w.sum();
      const LossBreakdown b = breakdown(ls);
      const double lo = *std::min_element(ls.begin(), ls.end());
      const double hi = *std::max_element(ls.begin(), ls.end());
      const double c = weighted_combine(b, w);
      CHECK(c >= lo - 1e-12);
      CHECK(c <= hi + 1e-12);
      CHECK(min_combine(b) == lo);
    }
  }

  TEST_CASE("tape forms agree with the plain functions and their gradients") {
    ad::Tape tape;
    const ad::Var pos = tape.variable(testing::rows({{0.5}}));
    std::vector<ad::Var> negs{tape.variable(testing::rows({{0.45}})), tape.variable(testing::rows({{0.55}}))};
    const ad::Var l = ad::contrastive_loss(pos, negs, 0.1);
    const std::vector<double> plain{0.45, 0.55};
    CHECK_NEAR(l.scalar(), contrastive_loss(0.5, plain, 0.1), 1e-15);
    tape.backward(l);
    // d/dpos = -(1 - p_pos) / tau, d/dn = p_n / tau.
    const double e0 = std::exp(5.0), e1 = std::exp(4.5), e2 = std::exp(5.5);
    const double z = e0 + e1 + e2;
    CHECK_NEAR(pos.grad()(0, 0), -(1.0 - e0 / z) / 0.1, 1e-12);
    CHECK_NEAR(negs[1].grad()(0, 0), e2 / z / 0.1, 1e-12);

    ad::Tape t2;
    std::vector<ad::Var> ls{t2.variable(testing::rows({{0.4}})), t2.variable(testing::rows({{0.2}})),
                            t2.variable(testing::rows({{0.2}}))};
    const ad::Var m = ad::min_combine(ls);
    CHECK(m.scalar() == 0.2);
    t2.backward(m);
    CHECK(ls[0].grad()(0, 0) == 0.0);
    CHECK(ls[1].grad()(0, 0) == 1.0);
    CHECK(ls[2].grad()(0, 0) == 0.0);

    ad::Tape t3;
    const ad::Var omega = t3.variable(testing::rows({{0.2, 0.5, 0.3}}));
    std::vector<ad::Var> ws{t3.variable(testing::rows({{1.0}})), t3.variable(testing::rows({{2.0}})),
                            t3.variable(testing::rows({{3.0}}))};
    const ad::Var w = ad::weighted_combine(omega, ws);
    CHECK_NEAR(w.scalar(), 2.1, 1e-15);
    t3.backward(w);
    testing::check_matrix(omega.grad(), testing::rows({{1.0, 2.0, 3.0}}), 1e-15);
    CHECK_NEAR(ws[1].grad()(0, 0), 0.5, 1e-15);

    ad::Tape t4;
    Matrix logits = testing::rows({{2.0, 0.5, -1.0}, {1.0, 3.0, 0.2}, {0.0, 0.1, 0.4}});
    const ad::Var lv = t4.variable(logits);
    const ad::Var ce = ad::symmetric_cross_entropy(lv);
    CHECK_NEAR(ce.scalar(), auxiliary_positive_loss(logits), 1e-14);
    t4.backward(ce);
    const Matrix g = lv.grad();
    auto f = [&] { return auxiliary_positive_loss(logits); };
    CHECK(max_relative_error(logits, g, 1e-6, f) < 1e-7);
  }
}
