#pragma once

#include <array>

namespace ddfuse {

/// Axis-aligned box in normalized image coordinates, stored center/size.
///
/// Coordinates are fractions of the image width/height and are not clamped:
/// a box may hang past the image border. Width and height must be strictly
/// positive; every coordinate must be finite.
class BoundingBox {
 public:
  /// Throws ValidationError on non-finite values or non-positive size.
  BoundingBox(double cx, double cy, double w, double h);

  /// Builds a box from pixel corner coordinates (x1, y1, x2, y2) on an image
  /// of `width_px` x `height_px`.
  static BoundingBox from_pixel_corners(double x1, double y1, double x2,
                                        double y2, double width_px,
                                        double height_px);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }

  double left() const { return cx_ - 0.5 * w_; }
  double right() const { return cx_ + 0.5 * w_; }
  double top() const { return cy_ - 0.5 * h_; }
  double bottom() const { return cy_ + 0.5 * h_; }
  double area() const { return w_ * h_; }

  /// {x1, y1, x2, y2} in pixels for an image of the given size.
  std::array<double, 4> to_pixel_corners(double width_px,
                                         double height_px) const;

  /// Same shape moved so its center is (cx, cy).
  BoundingBox recentered(double cx, double cy) const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double cx_;
  double cy_;
  double w_;
  double h_;
};

struct SimilarityConfig {
  double alpha1 = 1.0;  // center-distance weight of euclid_similarity
  double alpha2 = 1.0;  // size-distance weight of euclid_similarity
  double alpha = 1.0;   // distance-decay rate of ddiou

  /// Throws ValidationError if any weight is negative or non-finite.
  void validate() const;
};

double center_distance(const BoundingBox& a, const BoundingBox& b);

/// Weighted Euclidean dissimilarity: alpha1 * |center delta| +
/// alpha2 * |(w, h) delta|. Zero for identical boxes, lower is more similar.
double euclid_similarity(const BoundingBox& a, const BoundingBox& b,
                         const SimilarityConfig& cfg = {});

double iou(const BoundingBox& a, const BoundingBox& b);

/// IoU of the two shapes after moving both centers onto each other.
double iou_star(const BoundingBox& a, const BoundingBox& b);

/// Distance-decay IoU: exp(-alpha * center_distance) * iou_star.
/// Strictly positive for valid boxes; equals 1 only for identical boxes.
double ddiou(const BoundingBox& a, const BoundingBox& b,
             const SimilarityConfig& cfg = {});

}  // namespace ddfuse
