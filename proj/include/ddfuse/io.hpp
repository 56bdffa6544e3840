#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddfuse/detection.hpp"
#include "ddfuse/metrics.hpp"
#include "ddfuse/pipeline.hpp"
#include "ddfuse/sim.hpp"

namespace ddfuse::io {

inline constexpr std::string_view kFormatVersion = "1.0";

/// How `bbox` arrays are encoded in an input file.
enum class BoxEncoding {
  kNormalizedCenter,  // [cx, cy, w, h], fractions of the image size
  kPixelCorners,      // [x1, y1, x2, y2] in pixels
};

struct DetectionFile {
  std::string format_version{kFormatVersion};
  std::string source;
  std::vector<Scene> scenes;

  friend bool operator==(const DetectionFile&, const DetectionFile&) = default;
};

struct GroundTruthFile {
  std::string format_version{kFormatVersion};
  std::vector<GroundTruthScene> scenes;

  friend bool operator==(const GroundTruthFile&, const GroundTruthFile&) = default;
};

// All parse_* functions throw ParseError naming the line (syntax errors) or
// the field path, e.g. "scenes[2].detections[0].score" (schema errors).
// Unknown fields are ignored.

DetectionFile parse_detection_file(std::string_view text,
                                   BoxEncoding encoding = BoxEncoding::kNormalizedCenter);
GroundTruthFile parse_ground_truth_file(std::string_view text,
                                        BoxEncoding encoding = BoxEncoding::kNormalizedCenter);
FusionConfig parse_fusion_config(std::string_view text);
ScenarioConfig parse_scenario_config(std::string_view text);

std::string to_json(const DetectionFile& file);
std::string to_json(const GroundTruthFile& file);
/// Fused scenes in the detection-file layout; each detection additionally
/// carries its masses, provenance and the per-source boxes.
std::string to_json(std::span<const FusedScene> scenes, std::string_view source = "fused");
std::string to_json(const EvalReport& report);
std::string to_json(const FusionConfig& cfg);
std::string to_json(const ScenarioConfig& cfg);

/// Whole file as a string; throws ParseError if it cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ddfuse::io
