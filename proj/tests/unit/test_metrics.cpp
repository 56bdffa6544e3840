#include <gtest/gtest.h>

#include "ddfuse/errors.hpp"
#include "ddfuse/metrics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ddfuse;
using ddfuse::testing::five_ninths_fixture;

namespace {

std::vector<Detection> perfect(const std::vector<GroundTruthBox>& gts) {
  std::vector<Detection> out;
  for (const auto& g : gts) out.push_back(Detection{g.box, 1.0, "p", g.class_id, g.image_id});
  return out;
}

}  // namespace

TEST(Evaluate, PerfectDetector) {
  const auto f = five_ninths_fixture();
  const EvalReport r = evaluate(perfect(f.gts), f.gts);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.ap, 1.0);
  EXPECT_EQ(r.tp, 3u);
  EXPECT_EQ(r.fp, 0u);
  EXPECT_EQ(r.fn, 0u);
}

TEST(Evaluate, NoDetections) {
  const auto f = five_ninths_fixture();
  const EvalReport r = evaluate({}, f.gts);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.ap, 0.0);
  EXPECT_EQ(r.fn, 3u);
  EXPECT_TRUE(r.pr_points.empty());
}

TEST(Evaluate, NoGroundTruth) {
  const auto f = five_ninths_fixture();
  const EvalReport r = evaluate(f.dets, {});
  EXPECT_EQ(r.ap, 0.0);
  EXPECT_EQ(r.fp, 3u);
  EXPECT_EQ(r.tp, 0u);
}

TEST(Evaluate, FiveNinths) {
  const auto f = five_ninths_fixture();
  const EvalReport r = evaluate(f.dets, f.gts);
  ASSERT_EQ(r.pr_points.size(), 3u);
  EXPECT_DOUBLE_EQ(r.pr_points[0].recall, 1.0 / 3);
  EXPECT_DOUBLE_EQ(r.pr_points[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(r.pr_points[1].recall, 1.0 / 3);
  EXPECT_DOUBLE_EQ(r.pr_points[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(r.pr_points[2].recall, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r.pr_points[2].precision, 2.0 / 3);
  EXPECT_NEAR(r.ap, 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(ddfuse::testing::brute_force_ap(f.dets, f.gts, 0.5), 5.0 / 9.0, 1e-15);
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
}

TEST(Evaluate, ElevenPoint) {
  const auto f = five_ninths_fixture();
  const EvalReport r = evaluate(f.dets, f.gts, 0.5, Interpolation::kElevenPoint);
  // Recall levels 0.0 .. 0.3 see precision 1, 0.4 .. 0.6 see 2/3, the rest 0.
  EXPECT_NEAR(r.ap, (4 * 1.0 + 3 * (2.0 / 3)) / 11.0, 1e-12);
}

TEST(Evaluate, HighestIouGroundTruthIsClaimed) {
  const std::vector<GroundTruthBox> gts{{BoundingBox(0.50, 0.5, 0.2, 0.2), 0, "i"},
                                        {BoundingBox(0.56, 0.5, 0.2, 0.2), 0, "i"}};
  const std::vector<Detection> dets{Detection{BoundingBox(0.55, 0.5, 0.2, 0.2), 0.9, "d", 0, "i"}};
  const ClaimResult c = claim_ground_truth(dets, gts, 0.5);
  EXPECT_EQ(c.claimed_gt[0], 1u);
}

TEST(Evaluate, ClassAndImageGate) {
  const std::vector<GroundTruthBox> gts{{BoundingBox(0.5, 0.5, 0.2, 0.2), 0, "i"}};
  const std::vector<Detection> wrong_class{
      Detection{BoundingBox(0.5, 0.5, 0.2, 0.2), 0.9, "d", 1, "i"}};
  const std::vector<Detection> wrong_image{
      Detection{BoundingBox(0.5, 0.5, 0.2, 0.2), 0.9, "d", 0, "j"}};
  EXPECT_EQ(evaluate(wrong_class, gts).tp, 0u);
  EXPECT_EQ(evaluate(wrong_image, gts).tp, 0u);
}

TEST(Evaluate, StricterThresholdNeverHelps) {
  const auto f = five_ninths_fixture();
  auto jittered = perfect(f.gts);
  for (std::size_t i = 0; i < jittered.size(); ++i) {
    const auto& b = jittered[i].box;
    jittered[i].box = b.recentered(b.cx() + 0.01 * (i + 1), b.cy());
    jittered[i].score = 0.9 - 0.1 * i;
  }
  const double loose = evaluate(jittered, f.gts, 0.5).ap;
  const double strict = evaluate(jittered, f.gts, 0.99).ap;
  EXPECT_EQ(loose, 1.0);
  EXPECT_LT(strict, loose);
}

TEST(Evaluate, ThresholdRange) {
  EXPECT_THROW(evaluate({}, {}, 0.0), ValidationError);
  EXPECT_THROW(evaluate({}, {}, 1.0), ValidationError);
}

TEST(PrCurveCsv, Shapes) {
  EXPECT_EQ(pr_curve_csv(EvalReport{}), "recall,precision\n");
  const auto f = five_ninths_fixture();
  EXPECT_EQ(pr_curve_csv(evaluate(perfect(f.gts), f.gts)),
            "recall,precision\n0.000000,1.000000\n1.000000,1.000000\n");
  EXPECT_EQ(pr_curve_csv(evaluate(f.dets, f.gts)),
            "recall,precision\n0.000000,1.000000\n0.333333,1.000000\n"
            "0.333333,0.500000\n0.666667,0.666667\n");
}

TEST(PrCurveSvg, RendersSeries) {
  const auto f = five_ninths_fixture();
  const std::vector<PrSeries> series{{"a <&> b", evaluate(f.dets, f.gts).pr_points}};
  const std::string svg = pr_curve_svg(series);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("a &lt;&amp;&gt; b"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(AveragePrecision, EnvelopeIsMonotone) {
  const std::vector<PrPoint> pts{{0.1, 0.5}, {0.2, 1.0}, {0.5, 0.4}, {0.6, 0.7}};
  const auto env = precision_envelope(pts);
  EXPECT_EQ(env, (std::vector<double>{1.0, 1.0, 0.7, 0.7}));
  EXPECT_NEAR(average_precision(pts, Interpolation::kAllPoints), 0.2 * 1.0 + 0.4 * 0.7, 1e-12);
}
