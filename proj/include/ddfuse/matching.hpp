#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "ddfuse/detection.hpp"
#include "ddfuse/geometry.hpp"

namespace ddfuse {

enum class Metric { kDdiou, kIou, kEuclid };
enum class Strategy { kOptimal, kGreedy };

Metric parse_metric(std::string_view name);
Strategy parse_strategy(std::string_view name);
std::string_view to_string(Metric m);
std::string_view to_string(Strategy s);

/// Score given to pairs that may never match (different classes).
inline constexpr double kForbiddenScore = -std::numeric_limits<double>::infinity();

/// Dense row-major rows x cols matrix of pairwise scores.
struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

/// Entry (i, j) scores a[i] against b[j] so that higher is always better:
/// ddiou and iou as-is, euclid_similarity negated. Cross-class entries hold
/// kForbiddenScore.
ScoreMatrix score_matrix(std::span<const Detection> a,
                         std::span<const Detection> b,
                         const SimilarityConfig& cfg = {},
                         Metric metric = Metric::kDdiou);

struct MatchPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double score = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

/// Pairs sorted by index into `a`; unmatched lists ascending.
struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_a;
  std::vector<std::size_t> unmatched_b;
};

/// Maximum-total one-to-one assignment of a rectangular matrix. Returns, for
/// every row, the assigned column or npos (only when rows > cols). Forbidden
/// entries are used only when unavoidable.
std::vector<std::size_t> solve_assignment(const ScoreMatrix& scores);

/// One-to-one matching of a against b.
///
/// kOptimal maximizes the summed score over all one-to-one assignments, then
/// drops pairs scoring below `threshold`. kGreedy repeatedly accepts the best
/// remaining entry at or above `threshold`, ties broken by lowest (i, j).
/// The threshold is compared in the metric's higher-is-better scale, so for
/// Metric::kEuclid it is a non-positive number (-max dissimilarity).
MatchResult match(const ScoreMatrix& scores, double threshold,
                  Strategy strategy = Strategy::kOptimal);

MatchResult match(std::span<const Detection> a, std::span<const Detection> b,
                  const SimilarityConfig& cfg, double threshold,
                  Strategy strategy = Strategy::kOptimal,
                  Metric metric = Metric::kDdiou);

}  // namespace ddfuse
