#include "hardneg/hardness.hpp"

#include "hardneg/fine_similarity.hpp"

namespace hardneg {

HardnessReport validate_hardness(const TextBundle& bundle, const EncoderBackend& encoder) {
  const SentenceVector anchor = encoder.embed_sentence(bundle.anchor);
  HardnessReport r;
  r.sim_anchor_positive = cosine(anchor.v, encoder.embed_sentence(bundle.positive).v);
  for (const auto& [c, text] : bundle.negatives) {
    const double s = cosine(anchor.v, encoder.embed_sentence(text).v);
    r.sim_anchor_negative[c] = s;
    r.hard[c] = s > r.sim_anchor_positive;
  }
  return r;
}

}  // namespace hardneg
