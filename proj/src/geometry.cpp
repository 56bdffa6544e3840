#include "ddfuse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddfuse/errors.hpp"

namespace ddfuse {

BoundingBox::BoundingBox(double cx, double cy, double w, double h)
    : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) ||
      !std::isfinite(h)) {
    throw ValidationError("bounding box has non-finite coordinates");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw ValidationError("bounding box must have positive width and height (w=" +
                          std::to_string(w) + ", h=" + std::to_string(h) + ")");
  }
}

BoundingBox BoundingBox::from_pixel_corners(double x1, double y1, double x2,
                                            double y2, double width_px,
                                            double height_px) {
  if (!(width_px > 0.0) || !(height_px > 0.0)) {
    throw ValidationError("image dimensions must be positive");
  }
  const double nx1 = x1 / width_px;
  const double nx2 = x2 / width_px;
  const double ny1 = y1 / height_px;
  const double ny2 = y2 / height_px;
  return BoundingBox(0.5 * (nx1 + nx2), 0.5 * (ny1 + ny2), nx2 - nx1,
                     ny2 - ny1);
}

std::array<double, 4> BoundingBox::to_pixel_corners(double width_px,
                                                    double height_px) const {
  return {left() * width_px, top() * height_px, right() * width_px,
          bottom() * height_px};
}

BoundingBox BoundingBox::recentered(double cx, double cy) const {
  return BoundingBox(cx, cy, w_, h_);
}

void SimilarityConfig::validate() const {
  for (double v : {alpha1, alpha2, alpha}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("similarity weights must be finite and >= 0");
    }
  }
}

double center_distance(const BoundingBox& a, const BoundingBox& b) {
  return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

double euclid_similarity(const BoundingBox& a, const BoundingBox& b,
                         const SimilarityConfig& cfg) {
  return cfg.alpha1 * center_distance(a, b) +
         cfg.alpha2 * std::hypot(a.w() - b.w(), a.h() - b.h());
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw =
      std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih =
      std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  // Edges are recomputed from center/size, so rounding can push the ratio
  // a hair past 1 for identical boxes.
  const double inter = iw * ih;
  return std::min(1.0, inter / (a.area() + b.area() - inter));
}

double iou_star(const BoundingBox& a, const BoundingBox& b) {
  const double inter = std::min(a.w(), b.w()) * std::min(a.h(), b.h());
  return inter / (a.area() + b.area() - inter);
}

double ddiou(const BoundingBox& a, const BoundingBox& b,
             const SimilarityConfig& cfg) {
  return std::exp(-cfg.alpha * center_distance(a, b)) * iou_star(a, b);
}

}  // namespace ddfuse
