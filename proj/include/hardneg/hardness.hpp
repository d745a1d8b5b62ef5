#pragma once

#include <map>

#include "hardneg/bundle.hpp"
#include "hardneg/encoder.hpp"

namespace hardneg {

// Whether each generated negative sits closer to the anchor than the
// generated positive does, in sentence-embedding cosine.
struct HardnessReport {
  double sim_anchor_positive = 0.0;
  std::map<ComponentKind, double> sim_anchor_negative;
  std::map<ComponentKind, bool> hard;  // sim_anchor_negative > sim_anchor_positive
};

// Report only; the bundle is never filtered. Encoder errors propagate.
HardnessReport validate_hardness(const TextBundle& bundle, const EncoderBackend& encoder);

}  // namespace hardneg
