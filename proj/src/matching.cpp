#include "ddfuse/matching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddfuse/errors.hpp"

namespace ddfuse {

Metric parse_metric(std::string_view name) {
  if (name == "ddiou") return Metric::kDdiou;
  if (name == "iou") return Metric::kIou;
  if (name == "euclid") return Metric::kEuclid;
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

Strategy parse_strategy(std::string_view name) {
  if (name == "optimal") return Strategy::kOptimal;
  if (name == "greedy") return Strategy::kGreedy;
  throw ValidationError("unknown match strategy '" + std::string(name) + "'");
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kDdiou: return "ddiou";
    case Metric::kIou: return "iou";
    case Metric::kEuclid: return "euclid";
  }
  return "?";
}

std::string_view to_string(Strategy s) {
  return s == Strategy::kOptimal ? "optimal" : "greedy";
}

ScoreMatrix score_matrix(std::span<const Detection> a,
                         std::span<const Detection> b,
                         const SimilarityConfig& cfg, Metric metric) {
  ScoreMatrix m{a.size(), b.size(), std::vector<double>(a.size() * b.size())};
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (a[i].class_id != b[j].class_id) {
        m(i, j) = kForbiddenScore;
        continue;
      }
      switch (metric) {
        case Metric::kDdiou: m(i, j) = ddiou(a[i].box, b[j].box, cfg); break;
        case Metric::kIou: m(i, j) = iou(a[i].box, b[j].box); break;
        case Metric::kEuclid:
          m(i, j) = -euclid_similarity(a[i].box, b[j].box, cfg);
          break;
      }
    }
  }
  return m;
}

namespace {

// Kuhn-Munkres with row/column potentials, minimizing cost. Requires
// rows <= cols; returns the column of each row.
std::vector<std::size_t> hungarian_min(const std::vector<double>& cost,
                                       std::size_t rows, std::size_t cols) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<std::size_t> solve_assignment(const ScoreMatrix& scores) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  const std::size_t n = scores.rows;
  const std::size_t m = scores.cols;
  if (n == 0) return {};
  if (m == 0) return std::vector<std::size_t>(n, npos);

  double lo = 0.0;
  double hi = 0.0;
  bool any_finite = false;
  for (double s : scores.values) {
    if (!std::isfinite(s)) continue;
    lo = any_finite ? std::min(lo, s) : s;
    hi = any_finite ? std::max(hi, s) : s;
    any_finite = true;
  }
  // Any assignment with fewer forbidden entries beats any with more.
  const double forbidden =
      lo - (hi - lo + 1.0) * static_cast<double>(std::min(n, m) + 1);

  const bool transpose = n > m;
  const std::size_t rows = transpose ? m : n;
  const std::size_t cols = transpose ? n : m;
  std::vector<double> cost(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double s = transpose ? scores(c, r) : scores(r, c);
      cost[r * cols + c] = -(std::isfinite(s) ? s : forbidden);
    }
  }
  const auto assigned = hungarian_min(cost, rows, cols);
  if (!transpose) return assigned;

  std::vector<std::size_t> row_to_col(n, npos);
  for (std::size_t r = 0; r < rows; ++r) row_to_col[assigned[r]] = r;
  return row_to_col;
}

namespace {

MatchResult finish(std::vector<MatchPair> pairs, std::size_t n, std::size_t m) {
  MatchResult out;
  std::sort(pairs.begin(), pairs.end(),
            [](const MatchPair& x, const MatchPair& y) { return x.a < y.a; });
  std::vector<char> used_a(n, 0), used_b(m, 0);
  for (const auto& p : pairs) {
    used_a[p.a] = 1;
    used_b[p.b] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!used_a[i]) out.unmatched_a.push_back(i);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!used_b[j]) out.unmatched_b.push_back(j);
  }
  out.pairs = std::move(pairs);
  return out;
}

}  // namespace

MatchResult match(const ScoreMatrix& scores, double threshold,
                  Strategy strategy) {
  std::vector<MatchPair> pairs;
  if (strategy == Strategy::kOptimal) {
    const auto row_to_col = solve_assignment(scores);
    for (std::size_t i = 0; i < row_to_col.size(); ++i) {
      const std::size_t j = row_to_col[i];
      if (j >= scores.cols) continue;
      const double s = scores(i, j);
      if (std::isfinite(s) && s >= threshold) pairs.push_back({i, j, s});
    }
  } else {
    std::vector<MatchPair> candidates;
    for (std::size_t i = 0; i < scores.rows; ++i) {
      for (std::size_t j = 0; j < scores.cols; ++j) {
        const double s = scores(i, j);
        if (std::isfinite(s) && s >= threshold) candidates.push_back({i, j, s});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const MatchPair& x, const MatchPair& y) {
                if (x.score != y.score) return x.score > y.score;
                if (x.a != y.a) return x.a < y.a;
                return x.b < y.b;
              });
    std::vector<char> used_a(scores.rows, 0), used_b(scores.cols, 0);
    for (const auto& c : candidates) {
      if (used_a[c.a] || used_b[c.b]) continue;
      used_a[c.a] = used_b[c.b] = 1;
      pairs.push_back(c);
    }
  }
  return finish(std::move(pairs), scores.rows, scores.cols);
}

MatchResult match(std::span<const Detection> a, std::span<const Detection> b,
                  const SimilarityConfig& cfg, double threshold,
                  Strategy strategy, Metric metric) {
  return match(score_matrix(a, b, cfg, metric), threshold, strategy);
}

}  // namespace ddfuse
