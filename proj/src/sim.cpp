#include "ddfuse/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "ddfuse/errors.hpp"
#include "ddfuse/geometry.hpp"

namespace ddfuse {
namespace {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_rate(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
}

void check_nonneg(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError(std::string(what) + " must be finite and >= 0");
  }
}

double uniform(Engine& rng, double lo, double hi) {
  if (lo == hi) {
    (void)rng();  // keep the stream position independent of the range
    return lo;
  }
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string scene_id(int s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04d", s);
  return buf;
}

std::vector<BoundingBox> place_targets(const ScenarioConfig& cfg, int scene) {
  Engine rng(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(scene), 0));
  const int count = boost::random::uniform_int_distribution<int>(
      cfg.targets_min, cfg.targets_max)(rng);
  std::vector<BoundingBox> placed;
  placed.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    bool ok = false;
    for (int attempt = 0; attempt < cfg.max_placement_attempts && !ok; ++attempt) {
      const double w = uniform(rng, cfg.size_min, cfg.size_max);
      const double h = uniform(rng, cfg.size_min, cfg.size_max);
      const double cx = uniform(rng, 0.5 * w, 1.0 - 0.5 * w);
      const double cy = uniform(rng, 0.5 * h, 1.0 - 0.5 * h);
      const BoundingBox candidate(cx, cy, w, h);
      ok = std::none_of(placed.begin(), placed.end(), [&](const BoundingBox& b) {
        return iou(candidate, b) > kMaxTargetOverlap;
      });
      if (ok) placed.push_back(candidate);
    }
    if (!ok) {
      throw PlacementError("could not place target " + std::to_string(t + 1) +
                           " of " + std::to_string(count) + " in " +
                           scene_id(scene) + " after " +
                           std::to_string(cfg.max_placement_attempts) +
                           " attempts");
    }
  }
  return placed;
}

Scene observe(const ScenarioConfig& cfg, const SensorModel& sensor, int scene,
              std::uint64_t stream, const std::vector<BoundingBox>& targets,
              double dx, double dy) {
  Engine rng(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(scene), stream));
  boost::random::bernoulli_distribution<double> occluded(sensor.occlusion_rate);
  boost::random::bernoulli_distribution<double> missed(sensor.miss_rate);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  boost::random::beta_distribution<double> tp_score(sensor.score_tp.alpha,
                                                    sensor.score_tp.beta);
  boost::random::beta_distribution<double> fp_score(sensor.score_fp.alpha,
                                                    sensor.score_fp.beta);

  Scene out{scene_id(scene), cfg.image_width_px, cfg.image_height_px, {}};
  auto emit = [&](double cx, double cy, double w, double h, double score) {
    out.detections.push_back(Detection{BoundingBox(cx + dx, cy + dy, w, h),
                                       std::clamp(score, 0.0, 1.0), sensor.name,
                                       cfg.class_id, out.image_id});
  };

  for (const auto& t : targets) {
    const bool hidden = occluded(rng);
    const bool lost = missed(rng);
    const double jx = sensor.center_noise_sigma * normal(rng);
    const double jy = sensor.center_noise_sigma * normal(rng);
    const double sw = std::max(0.1, 1.0 + sensor.size_noise_sigma * normal(rng));
    const double sh = std::max(0.1, 1.0 + sensor.size_noise_sigma * normal(rng));
    const double score = tp_score(rng);
    if (hidden || lost) continue;
    emit(t.cx() + jx, t.cy() + jy, t.w() * sw, t.h() * sh, score);
  }

  if (sensor.false_positive_rate > 0.0) {
    const int spurious = boost::random::poisson_distribution<int, double>(
        sensor.false_positive_rate)(rng);
    for (int k = 0; k < spurious; ++k) {
      const double w = uniform(rng, cfg.size_min, cfg.size_max);
      const double h = uniform(rng, cfg.size_min, cfg.size_max);
      const double cx = uniform(rng, 0.5 * w, 1.0 - 0.5 * w);
      const double cy = uniform(rng, 0.5 * h, 1.0 - 0.5 * h);
      emit(cx, cy, w, h, fp_score(rng));
    }
  }
  return out;
}

}  // namespace

void SensorModel::validate() const {
  check_rate(miss_rate, "miss_rate");
  check_rate(occlusion_rate, "occlusion_rate");
  check_nonneg(false_positive_rate, "false_positive_rate");
  check_nonneg(center_noise_sigma, "center_noise_sigma");
  check_nonneg(size_noise_sigma, "size_noise_sigma");
  for (double p : {score_tp.alpha, score_tp.beta, score_fp.alpha, score_fp.beta}) {
    if (!std::isfinite(p) || p <= 0.0) {
      throw ValidationError("score distribution parameters must be > 0");
    }
  }
}

void ScenarioConfig::validate() const {
  if (scenes < 0) throw ValidationError("scenes must be >= 0");
  if (targets_min < 0 || targets_max < targets_min) {
    throw ValidationError("targets range must satisfy 0 <= min <= max");
  }
  if (!(size_min > 0.0) || size_max < size_min || size_max >= 1.0) {
    throw ValidationError("size range must satisfy 0 < min <= max < 1");
  }
  if (image_width_px <= 0 || image_height_px <= 0) {
    throw ValidationError("image dimensions must be positive");
  }
  if (!std::isfinite(offset_b_x) || !std::isfinite(offset_b_y)) {
    throw ValidationError("offset_b must be finite");
  }
  if (max_placement_attempts <= 0) {
    throw ValidationError("max_placement_attempts must be positive");
  }
  sensor_a.validate();
  sensor_b.validate();
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t scene,
                                 std::uint64_t stream) {
  return splitmix64(splitmix64(seed) + 4 * scene + stream);
}

SimulatedData generate(const ScenarioConfig& cfg) {
  cfg.validate();
  SimulatedData out;
  out.truth.reserve(static_cast<std::size_t>(cfg.scenes));
  out.a.reserve(static_cast<std::size_t>(cfg.scenes));
  out.b.reserve(static_cast<std::size_t>(cfg.scenes));
  for (int s = 0; s < cfg.scenes; ++s) {
    const auto targets = place_targets(cfg, s);
    GroundTruthScene truth{scene_id(s), cfg.image_width_px, cfg.image_height_px, {}};
    for (const auto& t : targets) {
      truth.boxes.push_back(GroundTruthBox{t, cfg.class_id, truth.image_id});
    }
    out.truth.push_back(std::move(truth));
    out.a.push_back(observe(cfg, cfg.sensor_a, s, 1, targets, 0.0, 0.0));
    out.b.push_back(
        observe(cfg, cfg.sensor_b, s, 2, targets, cfg.offset_b_x, cfg.offset_b_y));
  }
  return out;
}

}  // namespace ddfuse
