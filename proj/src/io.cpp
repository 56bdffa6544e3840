#include "ddfuse/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "ddfuse/errors.hpp"

namespace ddfuse::io {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ParseError("line " + std::to_string(line), "malformed JSON");
  }
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path.empty() ? "<root>" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(join(path, key), "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(path, "expected a finite number");
  return d;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
  const auto i = v.get<long long>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
    throw ParseError(path, "integer out of range");
  }
  return static_cast<int>(i);
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array");
  return v;
}

template <typename T, typename Read>
T optional_field(const json& obj, std::string_view key, const std::string& path,
                 T fallback, Read read) {
  if (!obj.is_object()) throw ParseError(path.empty() ? "<root>" : path, "expected an object");
  auto it = obj.find(key);
  return it == obj.end() ? fallback : read(*it, join(path, key));
}

int positive_dimension(const json& scene, std::string_view key, const std::string& path) {
  const int v = integer(require(scene, key, path), join(path, key));
  if (v <= 0) throw ParseError(join(path, key), "image dimension must be positive");
  return v;
}

BoundingBox parse_box(const json& v, const std::string& path, BoxEncoding encoding,
                      int width_px, int height_px) {
  const json& arr = array(v, path);
  if (arr.size() != 4) throw ParseError(path, "bbox needs exactly 4 numbers");
  double c[4];
  for (std::size_t i = 0; i < 4; ++i) c[i] = number(arr[i], index(path, i));
  try {
    if (encoding == BoxEncoding::kPixelCorners) {
      return BoundingBox::from_pixel_corners(c[0], c[1], c[2], c[3], width_px, height_px);
    }
    return BoundingBox(c[0], c[1], c[2], c[3]);
  } catch (const ValidationError& e) {
    throw ParseError(path, e.what());
  }
}

template <typename SceneT, typename ReadItem>
std::vector<SceneT> parse_scenes(const json& root, std::string_view items_key,
                                 ReadItem read_item) {
  std::vector<SceneT> scenes;
  const json& arr = array(require(root, "scenes", ""), "scenes");
  scenes.reserve(arr.size());
  for (std::size_t s = 0; s < arr.size(); ++s) {
    const std::string path = index("scenes", s);
    const json& js = arr[s];
    SceneT scene;
    scene.image_id = string(require(js, "image_id", path), join(path, "image_id"));
    scene.image_width_px = positive_dimension(js, "image_width_px", path);
    scene.image_height_px = positive_dimension(js, "image_height_px", path);
    const std::string items_path = join(path, items_key);
    const json& items = array(require(js, items_key, path), items_path);
    for (std::size_t k = 0; k < items.size(); ++k) {
      read_item(scene, items[k], index(items_path, k));
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

ordered_json box_json(const BoundingBox& b) {
  return ordered_json::array({b.cx(), b.cy(), b.w(), b.h()});
}

ordered_json scene_header(const std::string& id, int w, int h) {
  ordered_json js;
  js["image_id"] = id;
  js["image_width_px"] = w;
  js["image_height_px"] = h;
  return js;
}

std::string dump(const ordered_json& js) { return js.dump(2) + "\n"; }

template <typename Fn>
auto as_parse_error(const std::string& where, Fn fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ParseError(where, e.what());
  }
}

}  // namespace

DetectionFile parse_detection_file(std::string_view text, BoxEncoding encoding) {
  const json root = parse_text(text);
  DetectionFile file;
  file.format_version = string(require(root, "format_version", ""), "format_version");
  file.source = optional_field<std::string>(root, "source", "", "", string);
  file.scenes = parse_scenes<Scene>(root, "detections", [&](Scene& scene, const json& jd,
                                                           const std::string& path) {
    Detection d{parse_box(require(jd, "bbox", path), join(path, "bbox"), encoding,
                          scene.image_width_px, scene.image_height_px)};
    d.score = number(require(jd, "score", path), join(path, "score"));
    if (d.score < 0.0 || d.score > 1.0) {
      throw ParseError(join(path, "score"), "score must lie in [0, 1]");
    }
    d.class_id = optional_field<int>(jd, "class_id", path, 0, integer);
    d.source = file.source;
    d.image_id = scene.image_id;
    scene.detections.push_back(std::move(d));
  });
  return file;
}

GroundTruthFile parse_ground_truth_file(std::string_view text, BoxEncoding encoding) {
  const json root = parse_text(text);
  GroundTruthFile file;
  file.format_version = string(require(root, "format_version", ""), "format_version");
  file.scenes = parse_scenes<GroundTruthScene>(
      root, "boxes", [&](GroundTruthScene& scene, const json& jb, const std::string& path) {
        GroundTruthBox g{parse_box(require(jb, "bbox", path), join(path, "bbox"), encoding,
                                   scene.image_width_px, scene.image_height_px)};
        g.class_id = optional_field<int>(jb, "class_id", path, 0, integer);
        g.image_id = scene.image_id;
        scene.boxes.push_back(std::move(g));
      });
  return file;
}

FusionConfig parse_fusion_config(std::string_view text) {
  const json root = parse_text(text);
  FusionConfig cfg;
  if (root.contains("similarity")) {
    const json& sim = root["similarity"];
    cfg.similarity.alpha1 = optional_field(sim, "alpha1", "similarity", 1.0, number);
    cfg.similarity.alpha2 = optional_field(sim, "alpha2", "similarity", 1.0, number);
    cfg.similarity.alpha = optional_field(sim, "alpha", "similarity", 1.0, number);
  }
  auto enum_field = [&](std::string_view key, auto parse, auto fallback) {
    return optional_field(root, key, "", fallback, [&](const json& v, const std::string& p) {
      return as_parse_error(p, [&] { return parse(string(v, p)); });
    });
  };
  cfg.metric = enum_field("metric", parse_metric, cfg.metric);
  cfg.match_strategy = enum_field("match_strategy", parse_strategy, cfg.match_strategy);
  cfg.geometry_policy =
      enum_field("geometry_policy", parse_geometry_policy, cfg.geometry_policy);
  cfg.output_score = enum_field("output_score", parse_output_score, cfg.output_score);
  cfg.match_threshold =
      optional_field(root, "match_threshold", "", cfg.match_threshold, number);
  if (root.contains("singleton_policy")) {
    const json& sp = root["singleton_policy"];
    const std::string kind = sp.is_string()
                                 ? string(sp, "singleton_policy")
                                 : string(require(sp, "kind", "singleton_policy"),
                                          "singleton_policy.kind");
    if (kind == "passthrough") {
      cfg.singleton_policy = SingletonPolicy::passthrough();
    } else if (kind == "discount") {
      cfg.singleton_policy = SingletonPolicy::discount(
          number(require(sp, "factor", "singleton_policy"), "singleton_policy.factor"));
    } else {
      throw ParseError("singleton_policy", "unknown policy '" + kind + "'");
    }
  }
  as_parse_error("config", [&] { cfg.validate(); return 0; });
  return cfg;
}

ScenarioConfig parse_scenario_config(std::string_view text) {
  const json root = parse_text(text);
  ScenarioConfig cfg;
  if (root.contains("seed")) {
    const json& s = root["seed"];
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<long long>() < 0)) {
      throw ParseError("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.scenes = optional_field(root, "scenes", "", cfg.scenes, integer);
  auto pair_field = [&](std::string_view key, auto read, auto& lo, auto& hi) {
    if (!root.contains(key)) return;
    const std::string path(key);
    const json& arr = array(root[std::string(key)], path);
    if (arr.size() != 2) throw ParseError(path, "expected two values");
    lo = read(arr[0], index(path, 0));
    hi = read(arr[1], index(path, 1));
  };
  pair_field("targets_per_scene", integer, cfg.targets_min, cfg.targets_max);
  pair_field("size_range", number, cfg.size_min, cfg.size_max);
  pair_field("offset_b", number, cfg.offset_b_x, cfg.offset_b_y);
  cfg.image_width_px = optional_field(root, "image_width_px", "", cfg.image_width_px, integer);
  cfg.image_height_px =
      optional_field(root, "image_height_px", "", cfg.image_height_px, integer);
  cfg.class_id = optional_field(root, "class_id", "", cfg.class_id, integer);
  cfg.max_placement_attempts = optional_field(root, "max_placement_attempts", "",
                                              cfg.max_placement_attempts, integer);

  auto read_sensor = [&](std::string_view key, SensorModel& s) {
    if (!root.contains(key)) return;
    const std::string path(key);
    const json& js = root[path];
    s.name = optional_field(js, "name", path, s.name, string);
    s.miss_rate = optional_field(js, "miss_rate", path, s.miss_rate, number);
    s.occlusion_rate = optional_field(js, "occlusion_rate", path, s.occlusion_rate, number);
    s.false_positive_rate =
        optional_field(js, "false_positive_rate", path, s.false_positive_rate, number);
    s.center_noise_sigma =
        optional_field(js, "center_noise_sigma", path, s.center_noise_sigma, number);
    s.size_noise_sigma =
        optional_field(js, "size_noise_sigma", path, s.size_noise_sigma, number);
    for (auto [name, dist] : {std::pair<const char*, ScoreDistribution*>{"score_tp", &s.score_tp},
                              {"score_fp", &s.score_fp}}) {
      if (!js.contains(name)) continue;
      const std::string dpath = join(path, name);
      dist->alpha = number(require(js[name], "alpha", dpath), join(dpath, "alpha"));
      dist->beta = number(require(js[name], "beta", dpath), join(dpath, "beta"));
    }
  };
  read_sensor("sensor_a", cfg.sensor_a);
  read_sensor("sensor_b", cfg.sensor_b);
  as_parse_error("config", [&] { cfg.validate(); return 0; });
  return cfg;
}

std::string to_json(const DetectionFile& file) {
  ordered_json root;
  root["format_version"] = file.format_version;
  root["source"] = file.source;
  root["scenes"] = ordered_json::array();
  for (const auto& scene : file.scenes) {
    ordered_json js = scene_header(scene.image_id, scene.image_width_px, scene.image_height_px);
    js["detections"] = ordered_json::array();
    for (const auto& d : scene.detections) {
      ordered_json jd;
      jd["bbox"] = box_json(d.box);
      jd["score"] = d.score;
      jd["class_id"] = d.class_id;
      js["detections"].push_back(std::move(jd));
    }
    root["scenes"].push_back(std::move(js));
  }
  return dump(root);
}

std::string to_json(const GroundTruthFile& file) {
  ordered_json root;
  root["format_version"] = file.format_version;
  root["scenes"] = ordered_json::array();
  for (const auto& scene : file.scenes) {
    ordered_json js = scene_header(scene.image_id, scene.image_width_px, scene.image_height_px);
    js["boxes"] = ordered_json::array();
    for (const auto& g : scene.boxes) {
      ordered_json jb;
      jb["bbox"] = box_json(g.box);
      jb["class_id"] = g.class_id;
      js["boxes"].push_back(std::move(jb));
    }
    root["scenes"].push_back(std::move(js));
  }
  return dump(root);
}

std::string to_json(std::span<const FusedScene> scenes, std::string_view source) {
  ordered_json root;
  root["format_version"] = kFormatVersion;
  root["source"] = source;
  root["scenes"] = ordered_json::array();
  for (const auto& scene : scenes) {
    ordered_json js = scene_header(scene.image_id, scene.image_width_px, scene.image_height_px);
    js["detections"] = ordered_json::array();
    for (const auto& d : scene.detections) {
      ordered_json jd;
      jd["bbox"] = box_json(d.box);
      jd["score"] = d.score;
      jd["class_id"] = d.class_id;
      jd["exists"] = d.exists;
      jd["not_exists"] = d.not_exists;
      jd["uncertainty"] = d.uncertainty;
      jd["provenance"] = to_string(d.provenance);
      if (d.box_a) jd["bbox_a"] = box_json(*d.box_a);
      if (d.box_b) jd["bbox_b"] = box_json(*d.box_b);
      js["detections"].push_back(std::move(jd));
    }
    root["scenes"].push_back(std::move(js));
  }
  return dump(root);
}

std::string to_json(const EvalReport& report) {
  ordered_json root;
  root["precision"] = report.precision;
  root["recall"] = report.recall;
  root["ap"] = report.ap;
  root["iou_threshold"] = report.iou_threshold;
  root["interpolation"] = to_string(report.interpolation);
  root["counts"] = {{"tp", report.tp},
                    {"fp", report.fp},
                    {"fn", report.fn},
                    {"ground_truth", report.num_ground_truth}};
  root["pr_points"] = ordered_json::array();
  for (const auto& p : report.pr_points) {
    root["pr_points"].push_back(ordered_json::array({p.recall, p.precision}));
  }
  return dump(root);
}

std::string to_json(const FusionConfig& cfg) {
  ordered_json root;
  root["similarity"] = {{"alpha1", cfg.similarity.alpha1},
                        {"alpha2", cfg.similarity.alpha2},
                        {"alpha", cfg.similarity.alpha}};
  root["metric"] = to_string(cfg.metric);
  root["match_threshold"] = cfg.match_threshold;
  root["match_strategy"] = to_string(cfg.match_strategy);
  if (cfg.singleton_policy.kind == SingletonPolicy::Kind::kDiscount) {
    root["singleton_policy"] = {{"kind", "discount"}, {"factor", cfg.singleton_policy.factor}};
  } else {
    root["singleton_policy"] = {{"kind", "passthrough"}};
  }
  root["geometry_policy"] = to_string(cfg.geometry_policy);
  root["output_score"] = to_string(cfg.output_score);
  return dump(root);
}

std::string to_json(const ScenarioConfig& cfg) {
  auto sensor = [](const SensorModel& s) {
    ordered_json js;
    js["name"] = s.name;
    js["miss_rate"] = s.miss_rate;
    js["occlusion_rate"] = s.occlusion_rate;
    js["false_positive_rate"] = s.false_positive_rate;
    js["center_noise_sigma"] = s.center_noise_sigma;
    js["size_noise_sigma"] = s.size_noise_sigma;
    js["score_tp"] = {{"alpha", s.score_tp.alpha}, {"beta", s.score_tp.beta}};
    js["score_fp"] = {{"alpha", s.score_fp.alpha}, {"beta", s.score_fp.beta}};
    return js;
  };
  ordered_json root;
  root["seed"] = cfg.seed;
  root["scenes"] = cfg.scenes;
  root["targets_per_scene"] = {cfg.targets_min, cfg.targets_max};
  root["size_range"] = {cfg.size_min, cfg.size_max};
  root["image_width_px"] = cfg.image_width_px;
  root["image_height_px"] = cfg.image_height_px;
  root["class_id"] = cfg.class_id;
  root["offset_b"] = {cfg.offset_b_x, cfg.offset_b_y};
  root["max_placement_attempts"] = cfg.max_placement_attempts;
  root["sensor_a"] = sensor(cfg.sensor_a);
  root["sensor_b"] = sensor(cfg.sensor_b);
  return dump(root);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ddfuse::io
