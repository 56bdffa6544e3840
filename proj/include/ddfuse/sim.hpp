#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddfuse/detection.hpp"

namespace ddfuse {

/// Beta(alpha, beta) confidence distribution.
struct ScoreDistribution {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Failure and noise model of one sensor channel.
struct SensorModel {
  std::string name = "sensor";
  double miss_rate = 0.0;
  /// Targets hidden from this sensor (e.g. under cloud), drawn per target.
  double occlusion_rate = 0.0;
  /// Expected spurious detections per scene (Poisson mean).
  double false_positive_rate = 0.0;
  /// Std. dev. of the center jitter, normalized units.
  double center_noise_sigma = 0.0;
  /// Std. dev. of the multiplicative size jitter.
  double size_noise_sigma = 0.0;
  ScoreDistribution score_tp{8.5, 1.5};
  ScoreDistribution score_fp{4.0, 6.0};

  void validate() const;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  int scenes = 50;
  int targets_min = 8;
  int targets_max = 12;
  double size_min = 0.08;
  double size_max = 0.15;
  int image_width_px = 1024;
  int image_height_px = 1024;
  int class_id = 0;
  SensorModel sensor_a{.name = "optical"};
  SensorModel sensor_b{.name = "sar"};
  /// Constant translation applied to every sensor B box.
  double offset_b_x = 0.0;
  double offset_b_y = 0.0;
  /// Placement attempts per target before giving up.
  int max_placement_attempts = 1000;

  /// Throws ValidationError on empty ranges or rates outside [0, 1].
  void validate() const;
};

/// Two targets in one scene never overlap by more than this IoU.
inline constexpr double kMaxTargetOverlap = 0.3;

struct SimulatedData {
  std::vector<GroundTruthScene> truth;
  std::vector<Scene> a;
  std::vector<Scene> b;

  friend bool operator==(const SimulatedData&, const SimulatedData&) = default;
};

/// Seed of the random stream for (scene, stream), stream 0 = target
/// placement, 1 = sensor A, 2 = sensor B:
///   splitmix64(splitmix64(seed) + 4 * scene + stream).
/// Each stream drives its own mt19937_64, so scenes and sensors are
/// independent and can be generated in any order.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t scene,
                                 std::uint64_t stream);

/// Deterministic synthetic dataset. Per scene: place targets (rejecting
/// overlaps above kMaxTargetOverlap), then for each sensor and each target,
/// in order, draw occlusion, miss, center jitter (x, y), size jitter (w, h)
/// and score, then a Poisson number of false positives. Throws
/// PlacementError when a target cannot be placed.
SimulatedData generate(const ScenarioConfig& cfg);

}  // namespace ddfuse
