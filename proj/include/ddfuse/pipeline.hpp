#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddfuse/detection.hpp"
#include "ddfuse/geometry.hpp"
#include "ddfuse/matching.hpp"

namespace ddfuse {

enum class Provenance { kBoth, kAOnly, kBOnly };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view name);

/// What happens to detections only one sensor produced.
struct SingletonPolicy {
  enum class Kind { kPassthrough, kDiscount };
  Kind kind = Kind::kPassthrough;
  /// Shafer discount: a fraction (1 - factor) of the mass moves to Theta.
  double factor = 1.0;

  static SingletonPolicy passthrough() { return {}; }
  static SingletonPolicy discount(double factor) { return {Kind::kDiscount, factor}; }
};

/// Canonical box of a matched pair: score-weighted mean of the two boxes, the
/// box of the more confident source, or always sensor A's box (for when
/// ground truth is annotated in A's frame and B is misregistered).
enum class GeometryPolicy { kScoreWeightedMean, kMaxScoreBox, kReferenceA };
enum class OutputScore { kExistsMass, kExistsPlusHalfTheta };

GeometryPolicy parse_geometry_policy(std::string_view name);
OutputScore parse_output_score(std::string_view name);
std::string_view to_string(GeometryPolicy g);
std::string_view to_string(OutputScore o);

struct FusionConfig {
  SimilarityConfig similarity;
  Metric metric = Metric::kDdiou;
  double match_threshold = 0.3;
  Strategy match_strategy = Strategy::kOptimal;
  SingletonPolicy singleton_policy;
  GeometryPolicy geometry_policy = GeometryPolicy::kScoreWeightedMean;
  OutputScore output_score = OutputScore::kExistsMass;

  /// Throws ValidationError on out-of-range settings.
  void validate() const;
};

/// Scores are clamped to this distance from 0 and 1 before mass construction.
inline constexpr double kScoreClamp = 1e-6;

struct FusedDetection {
  BoundingBox box;
  std::optional<BoundingBox> box_a;
  std::optional<BoundingBox> box_b;
  /// Reported confidence; equals `exists` unless OutputScore says otherwise.
  double score = 0.0;
  /// Fused masses on {exists}, {not_exists} and Theta; they sum to 1.
  double exists = 0.0;
  double not_exists = 0.0;
  double uncertainty = 0.0;
  Provenance provenance = Provenance::kBoth;
  int class_id = 0;
  std::string image_id;

  friend bool operator==(const FusedDetection&, const FusedDetection&) = default;
};

/// Match two detection sets of one image and fuse their confidences with
/// compatibility-weighted Dempster-Shafer combination. Output is sorted by
/// descending score, then provenance, then box center.
std::vector<FusedDetection> fuse_scene(std::span<const Detection> a,
                                       std::span<const Detection> b,
                                       const FusionConfig& cfg);

struct FusedScene {
  std::string image_id;
  int image_width_px = 1;
  int image_height_px = 1;
  std::vector<FusedDetection> detections;
};

/// fuse_scene over every image id. Scenes are paired by image id and
/// returned in the order of `a`. Throws PairingError naming every id present
/// on only one side. `threads` <= 1 runs inline; results do not depend on it.
std::vector<FusedScene> fuse_dataset(std::span<const Scene> a,
                                     std::span<const Scene> b,
                                     const FusionConfig& cfg,
                                     unsigned threads = 1);

/// The fused output viewed as plain detections (canonical box, reported
/// score), e.g. for evaluation.
std::vector<Detection> as_detections(std::span<const FusedScene> scenes,
                                     const std::string& source = "fused");

}  // namespace ddfuse
