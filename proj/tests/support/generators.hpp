#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ddfuse/detection.hpp"
#include "ddfuse/evidence.hpp"
#include "ddfuse/geometry.hpp"

namespace ddfuse::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);

/// Box with center in [-0.2, 1.2]^2 and sides in [0.01, 0.5].
BoundingBox random_box(Rng& rng);

/// Frame {H0, H1, ...} with `size` hypotheses.
FramePtr make_frame(std::size_t size);

/// Random mass function with up to `max_focal` focal elements drawn from all
/// non-empty subsets.
MassFunction random_mass(Rng& rng, const FramePtr& frame, int max_focal = 4);

/// Random mass function whose focal elements are singletons and/or Theta.
MassFunction random_simple_mass(Rng& rng, const FramePtr& frame);

std::vector<Detection> random_detections(Rng& rng, int count, const std::string& image_id,
                                         int num_classes = 1);

}  // namespace ddfuse::testing
