#include "ddfuse/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddfuse/errors.hpp"
#include "ddfuse/evidence.hpp"
#include "ddfuse/io.hpp"
#include "ddfuse/matching.hpp"
#include "ddfuse/metrics.hpp"
#include "ddfuse/pipeline.hpp"
#include "ddfuse/sim.hpp"

namespace ddfuse::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string config;
};

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

io::BoxEncoding encoding(bool pixel_coords) {
  return pixel_coords ? io::BoxEncoding::kPixelCorners
                      : io::BoxEncoding::kNormalizedCenter;
}

// --- fuse -------------------------------------------------------------------

struct FuseOptions {
  std::string a, b, out;
  bool pixel_coords = false;
  std::optional<std::string> metric, strategy;
  std::optional<double> threshold;
};

int cmd_fuse(const GlobalOptions& g, const FuseOptions& o, std::ostream&,
             std::ostream& err) {
  FusionConfig cfg = g.config.empty() ? FusionConfig{}
                                      : io::parse_fusion_config(io::read_file(g.config));
  if (o.metric) cfg.metric = parse_metric(*o.metric);
  if (o.strategy) cfg.match_strategy = parse_strategy(*o.strategy);
  if (o.threshold) cfg.match_threshold = *o.threshold;
  cfg.validate();

  const auto a = io::parse_detection_file(io::read_file(o.a), encoding(o.pixel_coords));
  const auto b = io::parse_detection_file(io::read_file(o.b), encoding(o.pixel_coords));

  const auto start = std::chrono::steady_clock::now();
  const auto fused = fuse_dataset(a.scenes, b.scenes, cfg, g.threads);
  const auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  io::write_file_atomic(o.out, io::to_json(fused));
  for (const auto& scene : fused) {
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& d : scene.detections) ++counts[static_cast<int>(d.provenance)];
    err << scene.image_id << ": " << counts[0] << " pairs, " << counts[1]
        << " a_only, " << counts[2] << " b_only\n";
  }
  err << "fusion time: " << fixed4(elapsed) << " ms (" << fused.size()
      << " scenes)\n";
  return kOk;
}

// --- eval -------------------------------------------------------------------

struct EvalOptions {
  std::string dets, gts, out, pr_csv, pr_svg;
  double iou_threshold = 0.5;
  std::string interp = "all";
  bool pixel_coords = false;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const Interpolation interp = parse_interpolation(o.interp);
  const auto dets = io::parse_detection_file(io::read_file(o.dets), encoding(o.pixel_coords));
  const auto gts =
      io::parse_ground_truth_file(io::read_file(o.gts), encoding(o.pixel_coords));
  const EvalReport report =
      evaluate(flatten(dets.scenes), flatten(gts.scenes), o.iou_threshold, interp);

  const std::string text = io::to_json(report);
  if (!o.pr_csv.empty()) io::write_file_atomic(o.pr_csv, pr_curve_csv(report));
  if (!o.pr_svg.empty()) {
    const PrSeries series[] = {{dets.source.empty() ? "detections" : dets.source,
                                report.pr_points}};
    io::write_file_atomic(o.pr_svg, pr_curve_svg(series));
  }
  if (o.out.empty()) {
    out << text;
  } else {
    io::write_file_atomic(o.out, text);
  }
  return kOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateOptions {
  std::string out_dir;
};

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& err) {
  ScenarioConfig cfg = g.config.empty()
                           ? ScenarioConfig{}
                           : io::parse_scenario_config(io::read_file(g.config));
  if (g.seed) cfg.seed = *g.seed;
  const SimulatedData data = generate(cfg);

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  io::write_file_atomic(dir / "ground_truth.json",
                        io::to_json(io::GroundTruthFile{std::string(io::kFormatVersion), data.truth}));
  io::write_file_atomic(
      dir / "detections_a.json",
      io::to_json(io::DetectionFile{std::string(io::kFormatVersion), cfg.sensor_a.name, data.a}));
  io::write_file_atomic(
      dir / "detections_b.json",
      io::to_json(io::DetectionFile{std::string(io::kFormatVersion), cfg.sensor_b.name, data.b}));
  io::write_file_atomic(dir / "scenario.json", io::to_json(cfg));

  std::size_t targets = 0, na = 0, nb = 0;
  for (std::size_t s = 0; s < data.truth.size(); ++s) {
    targets += data.truth[s].boxes.size();
    na += data.a[s].detections.size();
    nb += data.b[s].detections.size();
  }
  err << "simulated " << data.truth.size() << " scenes, " << targets << " targets, "
      << na << " " << cfg.sensor_a.name << " and " << nb << " " << cfg.sensor_b.name
      << " detections\n";
  return kOk;
}

// --- match ------------------------------------------------------------------

struct MatchOptions {
  std::string a, b, image_id;
  std::string metric = "ddiou";
  std::string strategy = "optimal";
  double threshold = 0.3;
  bool pixel_coords = false;
};

int cmd_match(const MatchOptions& o, std::ostream& out) {
  const Metric metric = parse_metric(o.metric);
  const Strategy strategy = parse_strategy(o.strategy);
  const auto a = io::parse_detection_file(io::read_file(o.a), encoding(o.pixel_coords));
  const auto b = io::parse_detection_file(io::read_file(o.b), encoding(o.pixel_coords));

  std::map<std::string, const Scene*> b_by_id;
  for (const auto& s : b.scenes) b_by_id[s.image_id] = &s;
  std::vector<std::string> missing;
  for (const auto& sa : a.scenes) {
    if (!o.image_id.empty() && sa.image_id != o.image_id) continue;
    auto it = b_by_id.find(sa.image_id);
    if (it == b_by_id.end()) {
      missing.push_back(sa.image_id);
      continue;
    }
    const Scene& sb = *it->second;
    const ScoreMatrix m = score_matrix(sa.detections, sb.detections, {}, metric);
    out << "scene " << sa.image_id << " (" << to_string(metric) << ", "
        << m.rows << "x" << m.cols << ")\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
      out << "  a" << i << ":";
      for (std::size_t j = 0; j < m.cols; ++j) {
        out << ' ' << (std::isfinite(m(i, j)) ? fixed4(m(i, j)) : std::string("   x  "));
      }
      out << '\n';
    }
    const MatchResult r = match(m, o.threshold, strategy);
    for (const auto& p : r.pairs) {
      out << "  pair a" << p.a << " <-> b" << p.b << " " << fixed4(p.score) << '\n';
    }
    out << "  unmatched a:";
    for (auto i : r.unmatched_a) out << " a" << i;
    out << "\n  unmatched b:";
    for (auto j : r.unmatched_b) out << " b" << j;
    out << '\n';
  }
  if (!missing.empty()) throw PairingError(std::move(missing));
  return kOk;
}

// --- ds-combine ---------------------------------------------------------------

struct DsOptions {
  std::string masses;
  std::string labels;
  bool unweighted = false;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& token, const std::string& where) {
  std::size_t b = token.find_first_not_of(" \t");
  std::size_t e = token.find_last_not_of(" \t");
  if (b == std::string::npos) throw ParseError(where, "empty value");
  double v = 0.0;
  const char* first = token.data() + b;
  const char* last = token.data() + e + 1;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(where, "not a number: '" + token + "'");
  }
  return v;
}

int cmd_ds_combine(const DsOptions& o, std::ostream& out) {
  const auto groups = split(o.masses, ';');
  std::vector<std::vector<double>> values;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::vector<double> row;
    const auto tokens = split(groups[i], ',');
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      row.push_back(parse_double(tokens[k], "evidence " + std::to_string(i + 1) +
                                                ", value " + std::to_string(k + 1)));
    }
    values.push_back(std::move(row));
  }

  std::vector<std::string> labels;
  if (!o.labels.empty()) {
    labels = split(o.labels, ',');
  } else {
    for (std::size_t k = 0; k < values.front().size(); ++k) {
      labels.push_back("A" + std::to_string(k + 1));
    }
  }
  const auto frame = std::make_shared<const Frame>(labels);
  const std::size_t hyps = frame->size();

  std::vector<MassFunction> evidence;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& row = values[i];
    if (row.size() != hyps && row.size() != hyps + 1) {
      throw ParseError("evidence " + std::to_string(i + 1),
                       "expected " + std::to_string(hyps) + " singleton masses, optionally "
                       "followed by a Theta mass");
    }
    std::map<Subset, double> masses;
    for (std::size_t k = 0; k < hyps; ++k) masses[frame->singleton(k)] += row[k];
    if (row.size() == hyps + 1) masses[frame->full()] += row[hyps];
    try {
      evidence.emplace_back(frame, masses);
    } catch (const ValidationError& e) {
      throw ParseError("evidence " + std::to_string(i + 1), e.what());
    }
  }

  std::vector<MassFunction> columns;
  MassFunction fused = MassFunction::vacuous(frame);
  std::string prefix = "m";
  if (o.unweighted || evidence.size() < 2) {
    columns = evidence;
    fused = dempster_combine(evidence);
  } else {
    WeightedMassSet weighted = weight_masses(evidence);
    fused = dempster_combine(weighted.discounted);
    columns = std::move(weighted.discounted);
    prefix = "m'";
  }

  std::vector<Subset> rows;
  for (std::size_t k = 0; k < hyps; ++k) rows.push_back(frame->singleton(k));
  std::vector<Subset> extra;
  for (const auto& m : columns) {
    for (const auto& [s, v] : m.focal()) extra.push_back(s);
  }
  for (const auto& [s, v] : fused.focal()) extra.push_back(s);
  std::sort(extra.begin(), extra.end());
  for (Subset s : extra) {
    if (std::find(rows.begin(), rows.end(), s) == rows.end()) rows.push_back(s);
  }
  // Theta always last, as in the usual table layout.
  if (auto it = std::find(rows.begin(), rows.end(), frame->full()); it != rows.end() &&
                                                                  hyps > 1) {
    rows.erase(it);
    rows.push_back(frame->full());
  }

  char cell[64];
  std::snprintf(cell, sizeof cell, "%-12s", "Hypothesis");
  out << cell;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    std::snprintf(cell, sizeof cell, "%-9s", (prefix + std::to_string(i + 1)).c_str());
    out << cell;
  }
  out << "Fusion\n";
  for (Subset s : rows) {
    std::snprintf(cell, sizeof cell, "%-12s", frame->describe(s).c_str());
    out << cell;
    if (frame->describe(s).size() >= 12) out << ' ';
    for (const auto& m : columns) out << fixed4(m.mass(s)) << "   ";
    out << fixed4(fused.mass(s)) << '\n';
  }
  return kOk;
}

// --- pr-curve -----------------------------------------------------------------

struct PrCurveOptions {
  std::vector<std::string> reports;
  std::string csv, svg;
};

EvalReport load_report(const std::string& path) {
  const std::string text = io::read_file(path);
  nlohmann::json js;
  try {
    js = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw ParseError(path, "malformed JSON");
  }
  EvalReport r;
  if (!js.is_object() || !js.contains("pr_points") || !js["pr_points"].is_array()) {
    throw ParseError(path + ": pr_points", "missing field");
  }
  for (std::size_t i = 0; i < js["pr_points"].size(); ++i) {
    const auto& p = js["pr_points"][i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ParseError(path + ": pr_points[" + std::to_string(i) + "]",
                       "expected [recall, precision]");
    }
    r.pr_points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (js.contains("ap") && js["ap"].is_number()) r.ap = js["ap"].get<double>();
  return r;
}

int cmd_pr_curve(const PrCurveOptions& o, std::ostream& out) {
  if (!o.csv.empty() && o.reports.size() != 1) {
    throw ParseError("--csv", "CSV output takes exactly one report");
  }
  std::vector<PrSeries> series;
  for (const auto& path : o.reports) {
    const EvalReport r = load_report(path);
    series.push_back({fs::path(path).stem().string() + " (AP " + fixed4(r.ap) + ")",
                      r.pr_points});
    if (o.csv.empty() && o.svg.empty()) out << pr_curve_csv(r);
    if (!o.csv.empty()) io::write_file_atomic(o.csv, pr_curve_csv(r));
  }
  if (!o.svg.empty()) io::write_file_atomic(o.svg, pr_curve_svg(series));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision-level fusion of two-sensor object detections", "ddfuse"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "RNG seed (overrides the scenario seed)");
  app.add_option("--threads", global.threads, "Worker threads for per-scene work")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", global.config, "Fusion or scenario config file (JSON)");

  FuseOptions fuse;
  auto* fuse_cmd = app.add_subcommand("fuse", "Match and fuse two detection files");
  fuse_cmd->add_option("--a", fuse.a, "Detections of sensor A")->required();
  fuse_cmd->add_option("--b", fuse.b, "Detections of sensor B")->required();
  fuse_cmd->add_option("--out", fuse.out, "Fused detection file")->required();
  fuse_cmd->add_flag("--pixel-coords", fuse.pixel_coords,
                     "Input boxes are [x1,y1,x2,y2] in pixels");
  fuse_cmd->add_option("--metric", fuse.metric, "ddiou | iou | euclid");
  fuse_cmd->add_option("--strategy", fuse.strategy, "optimal | greedy");
  fuse_cmd->add_option("--threshold", fuse.threshold, "Match threshold");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Precision, recall and AP against ground truth");
  eval_cmd->add_option("--dets", eval.dets, "Detection file")->required();
  eval_cmd->add_option("--gts", eval.gts, "Ground-truth file")->required();
  eval_cmd->add_option("--iou-threshold", eval.iou_threshold, "IoU for a true positive")
      ->capture_default_str();
  eval_cmd->add_option("--interp", eval.interp, "all | 11pt")->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Report JSON (default: stdout)");
  eval_cmd->add_option("--pr-csv", eval.pr_csv, "Write the PR curve as CSV");
  eval_cmd->add_option("--pr-svg", eval.pr_svg, "Write the PR curve as SVG");
  eval_cmd->add_flag("--pixel-coords", eval.pixel_coords,
                     "Input boxes are [x1,y1,x2,y2] in pixels");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic paired dataset");
  sim_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->required();

  MatchOptions mo;
  auto* match_cmd = app.add_subcommand("match", "Print score matrices and matched pairs");
  match_cmd->add_option("--a", mo.a, "Detections of sensor A")->required();
  match_cmd->add_option("--b", mo.b, "Detections of sensor B")->required();
  match_cmd->add_option("--metric", mo.metric, "ddiou | iou | euclid")->capture_default_str();
  match_cmd->add_option("--strategy", mo.strategy, "optimal | greedy")->capture_default_str();
  match_cmd->add_option("--threshold", mo.threshold, "Match threshold")->capture_default_str();
  match_cmd->add_option("--image-id", mo.image_id, "Only this scene");
  match_cmd->add_flag("--pixel-coords", mo.pixel_coords,
                      "Input boxes are [x1,y1,x2,y2] in pixels");

  DsOptions ds;
  auto* ds_cmd = app.add_subcommand(
      "ds-combine", "Weighted Dempster-Shafer fusion of inline mass functions");
  ds_cmd->add_option("masses", ds.masses,
                     "Evidences separated by ';', singleton masses by ',' "
                     "(optional trailing Theta mass), e.g. \"0.9,0.1;0.8,0.2\"")
      ->required();
  ds_cmd->add_option("--labels", ds.labels, "Comma-separated hypothesis names");
  ds_cmd->add_flag("--unweighted", ds.unweighted, "Plain Dempster combination");

  PrCurveOptions pr;
  auto* pr_cmd = app.add_subcommand("pr-curve", "Render PR curves from eval reports");
  pr_cmd->add_option("--report", pr.reports, "Eval report JSON (repeatable)")->required();
  pr_cmd->add_option("--csv", pr.csv, "CSV output (single report)");
  pr_cmd->add_option("--svg", pr.svg, "SVG output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (*fuse_cmd) return cmd_fuse(global, fuse, out, err);
    if (*eval_cmd) return cmd_eval(eval, out);
    if (*sim_cmd) return cmd_simulate(global, sim, err);
    if (*match_cmd) return cmd_match(mo, out);
    if (*ds_cmd) return cmd_ds_combine(ds, out);
    if (*pr_cmd) return cmd_pr_curve(pr, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kParseError;
  } catch (const FrameError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kParseError;
  } catch (const PairingError& e) {
    err << "pairing error: " << e.what() << '\n';
    return kPairingError;
  } catch (const TotalConflictError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace ddfuse::cli
