#include "ddfuse/detection.hpp"

#include <string>

#include "ddfuse/errors.hpp"

namespace ddfuse {

void Detection::validate() const {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ValidationError("detection score must lie in [0, 1], got " +
                          std::to_string(score));
  }
}

std::vector<Detection> flatten(const std::vector<Scene>& scenes) {
  std::vector<Detection> out;
  for (const auto& scene : scenes) {
    for (auto d : scene.detections) {
      d.image_id = scene.image_id;
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::vector<GroundTruthBox> flatten(const std::vector<GroundTruthScene>& scenes) {
  std::vector<GroundTruthBox> out;
  for (const auto& scene : scenes) {
    for (auto g : scene.boxes) {
      g.image_id = scene.image_id;
      out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace ddfuse
