#pragma once

// Small hand-checked inputs shared by unit and acceptance tests.

#include <vector>

#include "ddfuse/detection.hpp"
#include "ddfuse/evidence.hpp"

namespace ddfuse::testing {

/// Optical 0.9 / SAR 0.8 confidences on the binary frame.
std::vector<MassFunction> ship_masses();

/// Frame {A, B, C}; m1 = {A: 0.99, B: 0.01}, m2 = {B: 0.01, C: 0.99}.
std::vector<MassFunction> zadeh_masses();

/// Three ground truths; detections at 0.9 (hit), 0.8 (miss) and 0.7 (hit).
struct ApFixture {
  std::vector<Detection> dets;
  std::vector<GroundTruthBox> gts;
};
ApFixture five_ninths_fixture();

/// One scene per sensor holding a single detection of the same ship.
struct PairFixture {
  Scene a;
  Scene b;
};
PairFixture ship_pair();

}  // namespace ddfuse::testing
