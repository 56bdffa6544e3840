#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ddfuse {

/// Subset of a frame encoded as a bit mask: bit k set <=> hypothesis k is in
/// the subset.
using Subset = std::uint32_t;

/// Frame of discernment: up to 16 mutually exclusive named hypotheses.
class Frame {
 public:
  static constexpr std::size_t kMaxHypotheses = 16;

  /// Throws FrameError on empty/duplicate labels or more than 16 of them.
  explicit Frame(std::vector<std::string> labels);

  /// The two-hypothesis frame {exists, not_exists} used for detection scores.
  static std::shared_ptr<const Frame> binary();

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t k) const { return labels_.at(k); }

  Subset full() const { return (Subset{1} << labels_.size()) - 1; }
  Subset singleton(std::size_t k) const;
  bool contains(Subset s) const { return (s & ~full()) == 0; }

  /// "{A,B}" style rendering; the full set prints as "Theta".
  std::string describe(Subset s) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::vector<std::string> labels_;
};

using FramePtr = std::shared_ptr<const Frame>;

/// Basic probability assignment over the power set of a frame, stored
/// sparsely. m(empty) = 0, masses are >= 0 and sum to 1 (within 1e-9).
class MassFunction {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Throws ValidationError if an invariant is violated. Entries with zero
  /// mass are dropped.
  MassFunction(FramePtr frame, const std::map<Subset, double>& masses);

  /// m(Theta) = 1.
  static MassFunction vacuous(FramePtr frame);

  const Frame& frame() const { return *frame_; }
  const FramePtr& frame_ptr() const { return frame_; }

  double mass(Subset s) const;
  double operator[](Subset s) const { return mass(s); }
  /// Focal elements with their masses, ordered by mask.
  const std::map<Subset, double>& focal() const { return masses_; }

 private:
  FramePtr frame_;
  std::map<Subset, double> masses_;
};

/// Inputs to and outputs of compatibility weighting.
struct WeightedMassSet {
  std::vector<MassFunction> original;
  /// weights[i][k] = w_i(A_k), N rows of M entries.
  std::vector<std::vector<double>> weights;
  /// Weighted evidences; the mass removed from singletons sits on Theta.
  std::vector<MassFunction> discounted;
};

/// m(exists) = score, m(not_exists) = 1 - score on a two-hypothesis frame
/// (index 0 = exists). Throws FrameError for any other arity and
/// ValidationError if score is outside [0, 1].
MassFunction mass_from_confidence(const FramePtr& frame, double score);

/// Relative compatibility of two evidences on singleton hypothesis k:
/// 2 mi mj / (mi^2 + mj^2). Defined as 1 when both masses are zero.
double compatibility(const MassFunction& mi, const MassFunction& mj,
                     std::size_t k);

/// Compatibility-coefficient weighting of N >= 2 evidences whose focal
/// elements are singletons and/or Theta.
WeightedMassSet weight_masses(std::span<const MassFunction> evidence);

/// Dempster's rule folded left to right. Throws TotalConflictError when the
/// non-conflicting mass K is below 1e-12.
MassFunction dempster_combine(std::span<const MassFunction> evidence);
MassFunction dempster_combine(const MassFunction& a, const MassFunction& b);

/// weight_masses followed by dempster_combine on the discounted evidences.
MassFunction fuse_weighted(std::span<const MassFunction> evidence);

double belief(const MassFunction& m, Subset subset);
double plausibility(const MassFunction& m, Subset subset);

}  // namespace ddfuse
