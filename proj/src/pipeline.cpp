#include "ddfuse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "ddfuse/errors.hpp"
#include "ddfuse/evidence.hpp"

namespace ddfuse {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kBoth: return "both";
    case Provenance::kAOnly: return "a_only";
    case Provenance::kBOnly: return "b_only";
  }
  return "?";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "both") return Provenance::kBoth;
  if (name == "a_only") return Provenance::kAOnly;
  if (name == "b_only") return Provenance::kBOnly;
  throw ValidationError("unknown provenance '" + std::string(name) + "'");
}

GeometryPolicy parse_geometry_policy(std::string_view name) {
  if (name == "score_weighted_mean") return GeometryPolicy::kScoreWeightedMean;
  if (name == "max_score_box") return GeometryPolicy::kMaxScoreBox;
  if (name == "reference_a") return GeometryPolicy::kReferenceA;
  throw ValidationError("unknown geometry policy '" + std::string(name) + "'");
}

OutputScore parse_output_score(std::string_view name) {
  if (name == "exists_mass") return OutputScore::kExistsMass;
  if (name == "exists_plus_half_theta") return OutputScore::kExistsPlusHalfTheta;
  throw ValidationError("unknown output score '" + std::string(name) + "'");
}

std::string_view to_string(GeometryPolicy g) {
  switch (g) {
    case GeometryPolicy::kScoreWeightedMean: return "score_weighted_mean";
    case GeometryPolicy::kMaxScoreBox: return "max_score_box";
    case GeometryPolicy::kReferenceA: return "reference_a";
  }
  return "score_weighted_mean";
}

std::string_view to_string(OutputScore o) {
  return o == OutputScore::kExistsMass ? "exists_mass" : "exists_plus_half_theta";
}

void FusionConfig::validate() const {
  similarity.validate();
  if (!std::isfinite(match_threshold)) {
    throw ValidationError("match threshold must be finite");
  }
  if (metric != Metric::kEuclid &&
      (match_threshold < 0.0 || match_threshold > 1.0)) {
    throw ValidationError("match threshold must lie in [0, 1]");
  }
  if (singleton_policy.kind == SingletonPolicy::Kind::kDiscount &&
      !(singleton_policy.factor >= 0.0 && singleton_policy.factor <= 1.0)) {
    throw ValidationError("singleton discount factor must lie in [0, 1]");
  }
}

namespace {

double clamp_score(double s) {
  return std::clamp(s, kScoreClamp, 1.0 - kScoreClamp);
}

BoundingBox fuse_geometry(const Detection& a, const Detection& b,
                          GeometryPolicy policy) {
  if (policy == GeometryPolicy::kMaxScoreBox) {
    return b.score > a.score ? b.box : a.box;
  }
  if (policy == GeometryPolicy::kReferenceA) return a.box;
  const double wa = clamp_score(a.score);
  const double wb = clamp_score(b.score);
  const double total = wa + wb;
  auto mix = [&](double x, double y) { return (wa * x + wb * y) / total; };
  return BoundingBox(mix(a.box.cx(), b.box.cx()), mix(a.box.cy(), b.box.cy()),
                     mix(a.box.w(), b.box.w()), mix(a.box.h(), b.box.h()));
}

double reported_score(const FusedDetection& d, OutputScore mode) {
  return mode == OutputScore::kExistsMass ? d.exists
                                          : d.exists + 0.5 * d.uncertainty;
}

FusedDetection single_source(const Detection& d, Provenance provenance,
                             const FusionConfig& cfg) {
  FusedDetection out{.box = d.box};
  if (provenance == Provenance::kAOnly) {
    out.box_a = d.box;
  } else {
    out.box_b = d.box;
  }
  const double factor =
      cfg.singleton_policy.kind == SingletonPolicy::Kind::kDiscount
          ? cfg.singleton_policy.factor
          : 1.0;
  out.exists = factor * d.score;
  out.not_exists = factor * (1.0 - d.score);
  out.uncertainty = 1.0 - factor;
  out.score = reported_score(out, cfg.output_score);
  out.provenance = provenance;
  out.class_id = d.class_id;
  out.image_id = d.image_id;
  return out;
}

}  // namespace

std::vector<FusedDetection> fuse_scene(std::span<const Detection> a,
                                       std::span<const Detection> b,
                                       const FusionConfig& cfg) {
  cfg.validate();
  for (const auto& d : a) d.validate();
  for (const auto& d : b) d.validate();

  const MatchResult matched = match(a, b, cfg.similarity, cfg.match_threshold,
                                    cfg.match_strategy, cfg.metric);
  const FramePtr frame = Frame::binary();
  const Subset exists = frame->singleton(0);
  const Subset not_exists = frame->singleton(1);

  std::vector<FusedDetection> out;
  out.reserve(matched.pairs.size() + matched.unmatched_a.size() +
              matched.unmatched_b.size());
  for (const auto& pair : matched.pairs) {
    const Detection& da = a[pair.a];
    const Detection& db = b[pair.b];
    const MassFunction evidence[] = {
        mass_from_confidence(frame, clamp_score(da.score)),
        mass_from_confidence(frame, clamp_score(db.score))};
    const MassFunction fused = fuse_weighted(evidence);

    FusedDetection f{.box = fuse_geometry(da, db, cfg.geometry_policy)};
    f.box_a = da.box;
    f.box_b = db.box;
    f.exists = fused.mass(exists);
    f.not_exists = fused.mass(not_exists);
    f.uncertainty = fused.mass(frame->full());
    f.score = reported_score(f, cfg.output_score);
    f.provenance = Provenance::kBoth;
    f.class_id = da.class_id;
    f.image_id = da.image_id.empty() ? db.image_id : da.image_id;
    out.push_back(std::move(f));
  }
  for (std::size_t i : matched.unmatched_a) {
    out.push_back(single_source(a[i], Provenance::kAOnly, cfg));
  }
  for (std::size_t j : matched.unmatched_b) {
    out.push_back(single_source(b[j], Provenance::kBOnly, cfg));
  }

  auto key = [](const FusedDetection& d) {
    return std::make_tuple(-d.score, static_cast<int>(d.provenance), d.box.cx(),
                           d.box.cy(), d.box.w(), d.box.h());
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const FusedDetection& x, const FusedDetection& y) {
                     return key(x) < key(y);
                   });
  return out;
}

std::vector<FusedScene> fuse_dataset(std::span<const Scene> a,
                                     std::span<const Scene> b,
                                     const FusionConfig& cfg, unsigned threads) {
  cfg.validate();
  std::map<std::string, std::size_t> b_index;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!b_index.emplace(b[j].image_id, j).second) {
      throw ValidationError("duplicate image id '" + b[j].image_id + "'");
    }
  }
  std::vector<std::string> missing;
  std::map<std::string, bool> seen_a;
  std::vector<std::size_t> partner(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!seen_a.emplace(a[i].image_id, true).second) {
      throw ValidationError("duplicate image id '" + a[i].image_id + "'");
    }
    auto it = b_index.find(a[i].image_id);
    if (it == b_index.end()) {
      missing.push_back(a[i].image_id);
    } else {
      partner[i] = it->second;
    }
  }
  for (const auto& [id, j] : b_index) {
    if (!seen_a.contains(id)) missing.push_back(id);
  }
  if (!missing.empty()) throw PairingError(std::move(missing));

  std::vector<FusedScene> out(a.size());
  auto run_one = [&](std::size_t i) {
    const Scene& sa = a[i];
    const Scene& sb = b[partner[i]];
    FusedScene& f = out[i];
    f.image_id = sa.image_id;
    f.image_width_px = sa.image_width_px;
    f.image_height_px = sa.image_height_px;
    f.detections = fuse_scene(sa.detections, sb.detections, cfg);
    for (auto& d : f.detections) d.image_id = sa.image_id;
  };

  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), a.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < a.size(); ++i) run_one(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < a.size(); i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Detection> as_detections(std::span<const FusedScene> scenes,
                                     const std::string& source) {
  std::vector<Detection> out;
  for (const auto& scene : scenes) {
    for (const auto& d : scene.detections) {
      out.push_back(Detection{d.box, d.score, source, d.class_id, scene.image_id});
    }
  }
  return out;
}

}  // namespace ddfuse
