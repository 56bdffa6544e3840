#include "ddfuse/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "ddfuse/errors.hpp"
#include "ddfuse/geometry.hpp"

namespace ddfuse {

Interpolation parse_interpolation(std::string_view name) {
  if (name == "all") return Interpolation::kAllPoints;
  if (name == "11pt") return Interpolation::kElevenPoint;
  throw ValidationError("unknown interpolation '" + std::string(name) +
                        "' (expected all or 11pt)");
}

std::string_view to_string(Interpolation i) {
  return i == Interpolation::kAllPoints ? "all" : "11pt";
}

ClaimResult claim_ground_truth(std::span<const Detection> dets,
                               std::span<const GroundTruthBox> gts,
                               double iou_threshold) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  ClaimResult out;
  out.order.resize(dets.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return dets[x].score > dets[y].score;
                   });
  out.is_tp.assign(dets.size(), false);
  out.claimed_gt.assign(dets.size(), npos);

  std::map<std::pair<std::string, int>, std::vector<std::size_t>> by_key;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    by_key[{gts[g].image_id, gts[g].class_id}].push_back(g);
  }
  std::vector<char> claimed(gts.size(), 0);
  for (std::size_t d : out.order) {
    auto it = by_key.find({dets[d].image_id, dets[d].class_id});
    if (it == by_key.end()) continue;
    std::size_t best = npos;
    double best_iou = iou_threshold;
    for (std::size_t g : it->second) {
      if (claimed[g]) continue;
      const double v = iou(dets[d].box, gts[g].box);
      if (v > best_iou || (best == npos && v >= iou_threshold)) {
        best = g;
        best_iou = v;
      }
    }
    if (best != npos) {
      claimed[best] = 1;
      out.is_tp[d] = true;
      out.claimed_gt[d] = best;
    }
  }
  return out;
}

std::vector<double> precision_envelope(std::span<const PrPoint> points) {
  std::vector<double> envelope(points.size());
  double running = 0.0;
  for (std::size_t i = points.size(); i-- > 0;) {
    running = std::max(running, points[i].precision);
    envelope[i] = running;
  }
  return envelope;
}

double average_precision(std::span<const PrPoint> points, Interpolation interp) {
  if (points.empty()) return 0.0;
  if (interp == Interpolation::kElevenPoint) {
    double total = 0.0;
    for (int t = 0; t <= 10; ++t) {
      const double r = t / 10.0;
      double best = 0.0;
      for (const auto& p : points) {
        if (p.recall >= r) best = std::max(best, p.precision);
      }
      total += best;
    }
    return total / 11.0;
  }
  const std::vector<double> envelope = precision_envelope(points);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].recall > prev_recall) {
      ap += (points[i].recall - prev_recall) * envelope[i];
      prev_recall = points[i].recall;
    }
  }
  return ap;
}

EvalReport evaluate(std::span<const Detection> dets,
                    std::span<const GroundTruthBox> gts, double iou_threshold,
                    Interpolation interp) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ValidationError("IoU threshold must lie in (0, 1)");
  }
  EvalReport report;
  report.iou_threshold = iou_threshold;
  report.interpolation = interp;
  report.num_ground_truth = gts.size();

  const ClaimResult claims = claim_ground_truth(dets, gts, iou_threshold);
  const double n_gt = static_cast<double>(gts.size());
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < claims.order.size(); ++k) {
    const std::size_t d = claims.order[k];
    claims.is_tp[d] ? ++tp : ++fp;
    const bool last_of_score =
        k + 1 == claims.order.size() ||
        dets[claims.order[k + 1]].score != dets[d].score;
    if (last_of_score) {
      report.pr_points.push_back(
          {gts.empty() ? 0.0 : static_cast<double>(tp) / n_gt,
           static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }
  }
  report.tp = tp;
  report.fp = fp;
  report.fn = gts.size() - tp;
  report.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  report.recall = gts.empty() ? 0.0 : static_cast<double>(tp) / n_gt;
  report.ap = gts.empty() ? 0.0 : average_precision(report.pr_points, interp);
  return report;
}

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string pr_curve_csv(const EvalReport& report) {
  std::string out = "recall,precision\n";
  if (report.pr_points.empty()) return out;
  char line[64];
  auto row = [&](double r, double p) {
    std::snprintf(line, sizeof line, "%.6f,%.6f\n", r, p);
    out += line;
  };
  row(0.0, 1.0);
  for (const auto& p : report.pr_points) row(p.recall, p.precision);
  return out;
}

std::string pr_curve_svg(std::span<const PrSeries> series) {
  constexpr double kSize = 400.0;
  constexpr double kMargin = 50.0;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  const double full = kSize + 2 * kMargin;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << full
      << "\" height=\"" << full << "\" viewBox=\"0 0 " << full << " " << full
      << "\">\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kMargin + kSize / 2 << "\" y=\"" << full - 10
      << "\" text-anchor=\"middle\">Recall</text>\n";
  svg << "<text x=\"15\" y=\"" << kMargin + kSize / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << kMargin + kSize / 2 << ")\">Precision</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    bool first = true;
    auto emit = [&](double r, double p) {
      if (!first) svg << ' ';
      svg << kMargin + r * kSize << ',' << kMargin + (1.0 - p) * kSize;
      first = false;
    };
    if (!series[s].points.empty()) emit(0.0, 1.0);
    for (const auto& p : series[s].points) emit(p.recall, p.precision);
    svg << "\"/>\n";
    svg << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + kSize - 10 - 18.0 * s
        << "\" fill=\"" << color << "\">" << xml_escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ddfuse
