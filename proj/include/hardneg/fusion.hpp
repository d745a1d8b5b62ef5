#pragma once

#include <cstdint>
#include <string_view>

#include "hardneg/autodiff.hpp"
#include "hardneg/encoder.hpp"

namespace hardneg {

enum class FusionVariant {
  // Video frames are queries; text tokens supply keys and values.
  CrossModal,
  // Video and text rows are concatenated and self-attended; only the
  // video-position outputs are kept.
  ConcatSelf,
};

std::string_view variant_tag(FusionVariant v);
FusionVariant parse_variant(std::string_view tag);

// Single-head attention projections, each dim x h. No biases, no positional
// encodings.
struct FusionParams {
  Matrix wq, wk, wv;
  FusionVariant variant = FusionVariant::CrossModal;

  Eigen::Index dim() const { return wq.rows(); }
  Eigen::Index hidden() const { return wq.cols(); }
};

// Text-conditioned video representation: per-frame outputs (frames x h) and
// their mean.
struct JointEmbedding {
  Eigen::RowVectorXd pooled;
  Matrix frames;
};

// Entries uniform on [-1/sqrt(dim), 1/sqrt(dim)], drawn for wq, wk, wv in
// turn, each in row-major order.
FusionParams init_fusion_params(Eigen::Index dim, Eigen::Index h, std::uint64_t seed,
                                FusionVariant variant = FusionVariant::CrossModal);

JointEmbedding attend_video_text(const FrameMatrix& video, const TokenMatrix& text, const FusionParams& params);

// Cosine of the pooled vectors.
double joint_similarity(const JointEmbedding& g1, const JointEmbedding& g2);

// Retrieval score of a (video, text) pair: cosine between the text-attended
// pooled embedding and the video's own pooled value projection,
// mean(video) * wv. A matching text lets every frame attend to tokens whose
// values reproduce the frame's own projection.
double retrieval_score(const FrameMatrix& video, const TokenMatrix& text, const FusionParams& params);

namespace ad {

struct FusionVars {
  Var wq, wk, wv;
  FusionVariant variant;
};

FusionVars record(Tape& tape, const FusionParams& p, bool trainable = true);

// Per-frame attended outputs, frames x h.
Var attend_frames(const FusionVars& p, const Var& video, const Var& text);

// 1 x h pooled joint embedding.
inline Var joint_embedding(const FusionVars& p, const Var& video, const Var& text) {
  return mean_rows(attend_frames(p, video, text));
}

// 1 x h pooled value projection of the video alone.
inline Var video_summary(const FusionVars& p, const Var& video) { return matmul(mean_rows(video), p.wv); }

}  // namespace ad

// Largest relative error between tape gradients and central differences of
// joint_similarity(attend(video, text_a), attend(video, text_b)) over every
// entry of wq, wk and wv.
double fusion_grad_check(const FusionParams& params, const FrameMatrix& video, const TokenMatrix& text_a,
                         const TokenMatrix& text_b, double step);

}  // namespace hardneg
