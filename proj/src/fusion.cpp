#include "hardneg/fusion.hpp"

#include <cmath>

#include "hardneg/error.hpp"
#include "hardneg/fine_similarity.hpp"
#include "hardneg/gradcheck.hpp"
#include "hardneg/rng.hpp"

namespace hardneg {

std::string_view variant_tag(FusionVariant v) {
  return v == FusionVariant::CrossModal ? "cross_modal" : "concat_self";
}

FusionVariant parse_variant(std::string_view tag) {
  if (tag == "cross_modal") return FusionVariant::CrossModal;
  if (tag == "concat_self") return FusionVariant::ConcatSelf;
  throw InvalidInputError("unknown fusion variant '" + std::string(tag) + "'");
}

FusionParams init_fusion_params(Eigen::Index dim, Eigen::Index h, std::uint64_t seed, FusionVariant variant) {
  if (dim < 1 || h < 1) throw ParameterError("fusion dims must be at least 1");
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  auto draw = [&] {
    Matrix m(dim, h);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < h; ++c) m(r, c) = rng.uniform(-bound, bound);
    return m;
  };
  FusionParams p;
  p.wq = draw();
  p.wk = draw();
  p.wv = draw();
  p.variant = variant;
  return p;
}

namespace ad {

FusionVars record(Tape& tape, const FusionParams& p, bool trainable) {
  auto leaf = [&](const Matrix& m) { return trainable ? tape.variable(m) : tape.constant(m); };
  return FusionVars{leaf(p.wq), leaf(p.wk), leaf(p.wv), p.variant};
}

Var attend_frames(const FusionVars& p, const Var& video, const Var& text) {
  if (video.cols() != p.wq.rows() || text.cols() != p.wq.rows()) {
    throw ShapeError("attend_frames: input dim does not match parameters");
  }
  const double inv_sqrt_h = 1.0 / std::sqrt(static_cast<double>(p.wq.cols()));
  const Var memory = p.variant == FusionVariant::CrossModal ? text : concat_rows(video, text);
  const Var q = matmul(video, p.wq);
  const Var k = matmul(memory, p.wk);
  const Var v = matmul(memory, p.wv);
  const Var attn = row_softmax(scale(matmul(q, transpose(k)), inv_sqrt_h));
  return matmul(attn, v);
}

}  // namespace ad

namespace {

void check_shapes(const FrameMatrix& video, const TokenMatrix& text, const FusionParams& params) {
  if (video.frames() < 1 || text.size() < 1) throw ShapeError("empty video or text");
  if (video.dim() != params.dim() || text.dim() != params.dim()) {
    throw ShapeError("video/text dim does not match fusion parameters");
  }
}

}  // namespace

JointEmbedding attend_video_text(const FrameMatrix& video, const TokenMatrix& text, const FusionParams& params) {
  check_shapes(video, text, params);
  ad::Tape tape;
  const auto p = ad::record(tape, params, false);
  const ad::Var frames = ad::attend_frames(p, tape.constant(video.rows), tape.constant(text.rows));
  JointEmbedding g;
  g.frames = frames.value();
  g.pooled = g.frames.colwise().mean();
  return g;
}

double joint_similarity(const JointEmbedding& g1, const JointEmbedding& g2) {
  return cosine(g1.pooled.transpose(), g2.pooled.transpose());
}

double retrieval_score(const FrameMatrix& video, const TokenMatrix& text, const FusionParams& params) {
  const JointEmbedding g = attend_video_text(video, text, params);
  const Eigen::RowVectorXd summary = video.rows.colwise().mean() * params.wv;
  return cosine(g.pooled.transpose(), summary.transpose());
}

double fusion_grad_check(const FusionParams& params, const FrameMatrix& video, const TokenMatrix& text_a,
                         const TokenMatrix& text_b, double step) {
  if (!(step > 0.0)) throw ParameterError("finite-difference step must be positive");
  check_shapes(video, text_a, params);
  check_shapes(video, text_b, params);

  ad::Tape tape;
  const auto vars = ad::record(tape, params, true);
  const ad::Var v = tape.constant(video.rows);
  const ad::Var out = ad::cosine(ad::joint_embedding(vars, v, tape.constant(text_a.rows)),
                                 ad::joint_embedding(vars, v, tape.constant(text_b.rows)));
  tape.backward(out);

  FusionParams probe = params;
  auto f = [&] {
    return joint_similarity(attend_video_text(video, text_a, probe), attend_video_text(video, text_b, probe));
  };
  double worst = 0.0;
  worst = std::max(worst, max_relative_error(probe.wq, vars.wq.grad(), step, f));
  worst = std::max(worst, max_relative_error(probe.wk, vars.wk.grad(), step, f));
  worst = std::max(worst, max_relative_error(probe.wv, vars.wv.grad(), step, f));
  return worst;
}

}  // namespace hardneg
