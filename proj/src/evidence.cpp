#include "ddfuse/evidence.hpp"

#include <bit>
#include <cmath>
#include <set>

#include "ddfuse/errors.hpp"

namespace ddfuse {
namespace {

constexpr double kConflictTolerance = 1e-12;
constexpr double kPruneBelow = 1e-15;

void require_same_frame(const MassFunction& a, const MassFunction& b) {
  if (a.frame_ptr() != b.frame_ptr() && !(a.frame() == b.frame())) {
    throw FrameError("evidences are defined on different frames");
  }
}

std::map<Subset, double> normalized(std::map<Subset, double> masses) {
  double total = 0.0;
  for (const auto& [s, m] : masses) total += m;
  for (auto& [s, m] : masses) m /= total;
  return masses;
}

}  // namespace

Frame::Frame(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty() || labels_.size() > kMaxHypotheses) {
    throw FrameError("frame must have between 1 and 16 hypotheses, got " +
                     std::to_string(labels_.size()));
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw FrameError("frame labels must be non-empty");
    if (!seen.insert(l).second) {
      throw FrameError("duplicate frame label '" + l + "'");
    }
  }
}

std::shared_ptr<const Frame> Frame::binary() {
  static const auto frame =
      std::make_shared<const Frame>(std::vector<std::string>{"exists", "not_exists"});
  return frame;
}

Subset Frame::singleton(std::size_t k) const {
  if (k >= labels_.size()) throw FrameError("hypothesis index out of range");
  return Subset{1} << k;
}

std::string Frame::describe(Subset s) const {
  if (s == full()) return "Theta";
  if (s == 0) return "{}";
  std::string out = "{";
  bool first = true;
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (s & (Subset{1} << k)) {
      if (!first) out += ",";
      out += labels_[k];
      first = false;
    }
  }
  return out + "}";
}

MassFunction::MassFunction(FramePtr frame,
                           const std::map<Subset, double>& masses)
    : frame_(std::move(frame)) {
  if (!frame_) throw ValidationError("mass function needs a frame");
  double total = 0.0;
  for (const auto& [s, m] : masses) {
    if (!std::isfinite(m) || m < 0.0) {
      throw ValidationError("mass values must be finite and >= 0");
    }
    if (!frame_->contains(s)) {
      throw ValidationError("subset mask outside the frame");
    }
    if (m == 0.0) continue;
    if (s == 0) throw ValidationError("the empty set must carry zero mass");
    masses_.emplace(s, m);
    total += m;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw ValidationError("masses must sum to 1 (got " +
                          std::to_string(total) + ")");
  }
}

MassFunction MassFunction::vacuous(FramePtr frame) {
  const Subset theta = frame->full();
  return MassFunction(std::move(frame), {{theta, 1.0}});
}

double MassFunction::mass(Subset s) const {
  auto it = masses_.find(s);
  return it == masses_.end() ? 0.0 : it->second;
}

MassFunction mass_from_confidence(const FramePtr& frame, double score) {
  if (frame->size() != 2) {
    throw FrameError("confidence masses need a two-hypothesis frame");
  }
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ValidationError("confidence score must lie in [0, 1]");
  }
  return MassFunction(frame,
                      {{frame->singleton(0), score}, {frame->singleton(1), 1.0 - score}});
}

double compatibility(const MassFunction& mi, const MassFunction& mj,
                     std::size_t k) {
  require_same_frame(mi, mj);
  const Subset a = mi.frame().singleton(k);
  const double x = mi.mass(a);
  const double y = mj.mass(a);
  const double denom = x * x + y * y;
  // Both sources give A_k nothing: full agreement.
  if (denom == 0.0) return 1.0;
  return 2.0 * x * y / denom;
}

WeightedMassSet weight_masses(std::span<const MassFunction> evidence) {
  const std::size_t n = evidence.size();
  if (n < 2) {
    throw ValidationError("compatibility weighting needs at least two evidences");
  }
  const Frame& frame = evidence[0].frame();
  const std::size_t hyps = frame.size();
  for (const auto& m : evidence) {
    require_same_frame(evidence[0], m);
    for (const auto& [s, v] : m.focal()) {
      if (std::popcount(s) != 1 && s != frame.full()) {
        throw UnsupportedStructureError(
            "compatibility weighting accepts mass on singletons and Theta only; "
            "found mass on " + frame.describe(s));
      }
    }
  }

  WeightedMassSet out;
  out.original.assign(evidence.begin(), evidence.end());
  out.weights.assign(n, std::vector<double>(hyps, 0.0));
  for (std::size_t k = 0; k < hyps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double absolute = 0.0;  // sum over j != i, i.e. sum_j R_ij - R_ii
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) absolute += compatibility(evidence[i], evidence[j], k);
      }
      out.weights[i][k] = absolute / static_cast<double>(n - 1);
    }
  }

  out.discounted.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::map<Subset, double> masses;
    double assigned = 0.0;
    for (std::size_t k = 0; k < hyps; ++k) {
      const double v = out.weights[i][k] * evidence[i].mass(frame.singleton(k));
      masses[frame.singleton(k)] += v;
      assigned += v;
    }
    masses[frame.full()] += std::max(0.0, 1.0 - assigned);
    out.discounted.emplace_back(evidence[i].frame_ptr(), masses);
  }
  return out;
}

MassFunction dempster_combine(const MassFunction& a, const MassFunction& b) {
  require_same_frame(a, b);
  std::map<Subset, double> acc;
  double agreeing = 0.0;
  double conflict = 0.0;
  for (const auto& [sa, ma] : a.focal()) {
    for (const auto& [sb, mb] : b.focal()) {
      const double p = ma * mb;
      const Subset meet = sa & sb;
      if (meet == 0) {
        conflict += p;
      } else {
        acc[meet] += p;
        agreeing += p;
      }
    }
  }
  if (agreeing < kConflictTolerance) throw TotalConflictError(conflict);

  for (auto& [s, m] : acc) m /= agreeing;
  std::erase_if(acc, [](const auto& kv) { return kv.second < kPruneBelow; });
  return MassFunction(a.frame_ptr(), normalized(std::move(acc)));
}

MassFunction dempster_combine(std::span<const MassFunction> evidence) {
  if (evidence.empty()) throw ValidationError("nothing to combine");
  MassFunction acc = evidence[0];
  for (std::size_t i = 1; i < evidence.size(); ++i) {
    acc = dempster_combine(acc, evidence[i]);
  }
  return acc;
}

MassFunction fuse_weighted(std::span<const MassFunction> evidence) {
  const WeightedMassSet weighted = weight_masses(evidence);
  return dempster_combine(weighted.discounted);
}

double belief(const MassFunction& m, Subset subset) {
  double total = 0.0;
  for (const auto& [s, v] : m.focal()) {
    if ((s & ~subset) == 0) total += v;
  }
  return total;
}

double plausibility(const MassFunction& m, Subset subset) {
  double total = 0.0;
  for (const auto& [s, v] : m.focal()) {
    if ((s & subset) != 0) total += v;
  }
  return total;
}

}  // namespace ddfuse
