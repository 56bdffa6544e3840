#pragma once

#include <string>
#include <vector>

#include "ddfuse/geometry.hpp"

namespace ddfuse {

/// One detector output: box, confidence in [0, 1], sensor tag and class.
struct Detection {
  BoundingBox box;
  double score = 0.0;
  std::string source;
  int class_id = 0;
  std::string image_id;

  /// Throws ValidationError if score is outside [0, 1].
  void validate() const;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruthBox {
  BoundingBox box;
  int class_id = 0;
  std::string image_id;

  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

/// All detections one sensor produced on one image.
struct Scene {
  std::string image_id;
  int image_width_px = 1;
  int image_height_px = 1;
  std::vector<Detection> detections;

  friend bool operator==(const Scene&, const Scene&) = default;
};

struct GroundTruthScene {
  std::string image_id;
  int image_width_px = 1;
  int image_height_px = 1;
  std::vector<GroundTruthBox> boxes;

  friend bool operator==(const GroundTruthScene&, const GroundTruthScene&) = default;
};

/// Concatenate per-scene lists, stamping each entry with its scene's id.
std::vector<Detection> flatten(const std::vector<Scene>& scenes);
std::vector<GroundTruthBox> flatten(const std::vector<GroundTruthScene>& scenes);

}  // namespace ddfuse
