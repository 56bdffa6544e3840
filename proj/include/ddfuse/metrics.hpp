#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddfuse/detection.hpp"

namespace ddfuse {

enum class Interpolation { kAllPoints, kElevenPoint };

Interpolation parse_interpolation(std::string_view name);
std::string_view to_string(Interpolation i);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t num_ground_truth = 0;
  /// Precision/recall over all detections; 0 when undefined.
  double precision = 0.0;
  double recall = 0.0;
  /// One point per distinct detection score, highest score first.
  std::vector<PrPoint> pr_points;
  double ap = 0.0;
  double iou_threshold = 0.5;
  Interpolation interpolation = Interpolation::kAllPoints;
};

/// Per-detection outcome of the ground-truth claim pass.
struct ClaimResult {
  /// Detection indices in processing order (descending score, then index).
  std::vector<std::size_t> order;
  /// is_tp[i] for detection i (input indexing).
  std::vector<bool> is_tp;
  /// Ground-truth index claimed by detection i, or npos.
  std::vector<std::size_t> claimed_gt;
};

/// Detections, highest score first, each claim the unclaimed ground truth of
/// the same image and class with the highest IoU >= iou_threshold.
ClaimResult claim_ground_truth(std::span<const Detection> dets,
                               std::span<const GroundTruthBox> gts,
                               double iou_threshold);

/// Interpolated precision at each point: the best precision at this or any
/// higher recall.
std::vector<double> precision_envelope(std::span<const PrPoint> points);

/// Area under the monotone precision envelope. `points` must be ordered by
/// non-decreasing recall.
double average_precision(std::span<const PrPoint> points, Interpolation interp);

/// Precision, recall and AP of `dets` against `gts` at an IoU threshold in
/// (0, 1). Throws ValidationError for a threshold outside that range.
EvalReport evaluate(std::span<const Detection> dets,
                    std::span<const GroundTruthBox> gts,
                    double iou_threshold = 0.5,
                    Interpolation interp = Interpolation::kAllPoints);

/// "recall,precision" CSV with 6 decimals. Non-empty curves start with a
/// (0, 1) anchor row.
std::string pr_curve_csv(const EvalReport& report);

/// A labelled PR curve for rendering.
struct PrSeries {
  std::string label;
  std::vector<PrPoint> points;
};

/// Self-contained SVG line chart of one or more PR curves.
std::string pr_curve_svg(std::span<const PrSeries> series);

}  // namespace ddfuse
