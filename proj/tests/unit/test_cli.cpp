#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <sys/wait.h>

#include "ddfuse/cli.hpp"
#include "ddfuse/io.hpp"
#include "ddfuse/metrics.hpp"
#include "ddfuse/pipeline.hpp"
#include "fixtures.hpp"

using namespace ddfuse;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ddfuse_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    io::write_file_atomic(dir_ / name, content);
    return path(name);
  }

  void write_ship_pair() const {
    const auto p = ddfuse::testing::ship_pair();
    write("a.json", io::to_json(io::DetectionFile{"1.0", "optical", {p.a}}));
    write("b.json", io::to_json(io::DetectionFile{"1.0", "sar", {p.b}}));
  }

  void write_five_ninths() const {
    const auto f = ddfuse::testing::five_ninths_fixture();
    write("dets.json", io::to_json(io::DetectionFile{"1.0", "det", {Scene{"img", 100, 100, f.dets}}}));
    write("gts.json", io::to_json(io::GroundTruthFile{"1.0", {GroundTruthScene{"img", 100, 100, f.gts}}}));
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, FuseShipPair) {
  write_ship_pair();
  const Outcome r = run_cli({"fuse", "--a", path("a.json"), "--b", path("b.json"), "--out",
                             path("fused.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto fused = io::parse_detection_file(io::read_file(path("fused.json")));
  ASSERT_EQ(fused.scenes.at(0).detections.size(), 1u);
  EXPECT_NEAR(fused.scenes[0].detections[0].score, 0.9725, 5e-5);
  EXPECT_NE(r.err.find("fusion time:"), std::string::npos);
  EXPECT_NE(io::read_file(path("fused.json")).find("\"provenance\": \"both\""), std::string::npos);
}

TEST_F(CliTest, FuseEmptySceneLists) {
  write("a.json", R"({"format_version": "1.0", "source": "a", "scenes": []})");
  write("b.json", R"({"format_version": "1.0", "source": "b", "scenes": []})");
  const Outcome r = run_cli({"fuse", "--a", path("a.json"), "--b", path("b.json"), "--out",
                             path("fused.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(io::parse_detection_file(io::read_file(path("fused.json"))).scenes.empty());
}

TEST_F(CliTest, MalformedInputLeavesNoOutput) {
  write_ship_pair();
  write("broken.json", "{\"scenes\": [\n  {\"image_id\": }\n]}");
  const Outcome r = run_cli({"fuse", "--a", path("a.json"), "--b", path("broken.json"),
                             "--out", path("fused.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("fused.json")));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++entries;
  EXPECT_EQ(entries, 3u);
}

TEST_F(CliTest, FieldErrorNamesPath) {
  write_ship_pair();
  std::string text = io::read_file(path("b.json"));
  text.replace(text.find("\"score\": 0.8"), 12, "\"score\": \"high\"");
  write("b.json", text);
  const Outcome r = run_cli({"fuse", "--a", path("a.json"), "--b", path("b.json"), "--out",
                             path("fused.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("scenes[0].detections[0].score"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnpairedScenes) {
  write_ship_pair();
  write("c.json", R"({"format_version": "1.0", "source": "c", "scenes": [
    {"image_id": "other", "image_width_px": 10, "image_height_px": 10, "detections": []}]})");
  const Outcome r = run_cli({"fuse", "--a", path("a.json"), "--b", path("c.json"), "--out",
                             path("fused.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("ever_given"), std::string::npos);
  EXPECT_NE(r.err.find("other"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("fused.json")));
}

TEST_F(CliTest, FusePixelCoords) {
  const std::string scene = R"({"format_version": "1.0", "source": "s", "scenes": [
    {"image_id": "p", "image_width_px": 800, "image_height_px": 600,
     "detections": [{"bbox": [272, 345, 368, 375], "score": SCORE, "class_id": 0}]}]})";
  auto with_score = [&](const char* s) {
    std::string t = scene;
    t.replace(t.find("SCORE"), 5, s);
    return t;
  };
  write("a.json", with_score("0.9"));
  write("b.json", with_score("0.8"));
  const Outcome r = run_cli({"fuse", "--pixel-coords", "--a", path("a.json"), "--b",
                             path("b.json"), "--out", path("fused.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto fused = io::parse_detection_file(io::read_file(path("fused.json")));
  const Detection& d = fused.scenes.at(0).detections.at(0);
  EXPECT_NEAR(d.score, 0.9725, 5e-5);
  EXPECT_NEAR(d.box.cx(), 0.4, 1e-12);
  EXPECT_NEAR(d.box.w(), 0.12, 1e-12);
}

TEST_F(CliTest, EvalFixtures) {
  write_five_ninths();
  const Outcome r = run_cli({"eval", "--dets", path("dets.json"), "--gts", path("gts.json"),
                             "--pr-csv", path("pr.csv"), "--pr-svg", path("pr.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"ap\": 0.5555555555555556"), std::string::npos) << r.out;
  EXPECT_EQ(io::read_file(path("pr.csv")),
            "recall,precision\n0.000000,1.000000\n0.333333,1.000000\n"
            "0.333333,0.500000\n0.666667,0.666667\n");
  EXPECT_NE(io::read_file(path("pr.svg")).find("<svg"), std::string::npos);

  const auto f = ddfuse::testing::five_ninths_fixture();
  std::vector<Detection> perfect;
  for (const auto& g : f.gts) perfect.push_back(Detection{g.box, 1.0, "p", 0, "img"});
  write("perfect.json",
        io::to_json(io::DetectionFile{"1.0", "p", {Scene{"img", 100, 100, perfect}}}));
  const Outcome p = run_cli({"eval", "--dets", path("perfect.json"), "--gts", path("gts.json"),
                             "--out", path("report.json")});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_NE(io::read_file(path("report.json")).find("\"ap\": 1.0"), std::string::npos);
}

TEST_F(CliTest, EvalStricterIouThreshold) {
  const auto f = ddfuse::testing::five_ninths_fixture();
  std::vector<Detection> jittered;
  for (std::size_t i = 0; i < f.gts.size(); ++i) {
    const auto& b = f.gts[i].box;
    jittered.push_back(Detection{b.recentered(b.cx() + 0.01 * (i + 1), b.cy()), 0.9 - 0.1 * i,
                                 "j", 0, "img"});
  }
  write("dets.json",
        io::to_json(io::DetectionFile{"1.0", "j", {Scene{"img", 100, 100, jittered}}}));
  write("gts.json",
        io::to_json(io::GroundTruthFile{"1.0", {GroundTruthScene{"img", 100, 100, f.gts}}}));
  auto ap_at = [&](const std::string& thr) {
    const Outcome r = run_cli({"eval", "--dets", path("dets.json"), "--gts", path("gts.json"),
                               "--iou-threshold", thr});
    EXPECT_EQ(r.code, 0) << r.err;
    return std::stod(r.out.substr(r.out.find("\"ap\": ") + 6));
  };
  EXPECT_LT(ap_at("0.99"), ap_at("0.5"));
  EXPECT_EQ(run_cli({"eval", "--dets", path("dets.json"), "--gts", path("gts.json"),
                     "--iou-threshold", "1.5"}).code,
            2);
}

TEST_F(CliTest, DsCombineTable) {
  const Outcome r = run_cli({"ds-combine", "0.9,0.1;0.8,0.2", "--labels", "exists,not_exists"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "Hypothesis  m'1      m'2      Fusion\n"
            "{exists}    0.8938   0.7945   0.9725\n"
            "{not_exists} 0.0800   0.1600   0.0260\n"
            "Theta       0.0262   0.0455   0.0015\n");
}

TEST_F(CliTest, DsCombineErrors) {
  EXPECT_EQ(run_cli({"ds-combine", "1,0;0,1", "--unweighted"}).code, 4);
  EXPECT_EQ(run_cli({"ds-combine", "0.9,abc;0.8,0.2"}).code, 2);
  EXPECT_EQ(run_cli({"ds-combine", "0.9,0.3;0.8,0.2"}).code, 2);
  const Outcome zadeh = run_cli({"ds-combine", "0.99,0.01,0;0,0.01,0.99", "--unweighted",
                                 "--labels", "A,B,C"});
  ASSERT_EQ(zadeh.code, 0) << zadeh.err;
  EXPECT_NE(zadeh.out.find("{B}         0.0100   0.0100   1.0000"), std::string::npos)
      << zadeh.out;
}

TEST_F(CliTest, MatchIdentity) {
  write_ship_pair();
  const Outcome r = run_cli({"match", "--a", path("a.json"), "--b", path("a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("pair a0 <-> b0 1.0000"), std::string::npos) << r.out;
}

TEST_F(CliTest, SimulateIsDeterministic) {
  write("scenario.json", R"({"seed": 5, "scenes": 4})");
  for (const char* sub : {"one", "two"}) {
    const Outcome r = run_cli({"--config", path("scenario.json"), "--seed", "17", "simulate",
                               "--out-dir", path(sub)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* name :
       {"ground_truth.json", "detections_a.json", "detections_b.json", "scenario.json"}) {
    EXPECT_EQ(io::read_file(dir_ / "one" / name), io::read_file(dir_ / "two" / name)) << name;
  }
  EXPECT_NE(io::read_file(dir_ / "one" / "scenario.json").find("\"seed\": 17"),
            std::string::npos);
}

TEST_F(CliTest, PipelineCompositionMatchesLibrary) {
  write("scenario.json", R"({"seed": 21, "scenes": 12,
    "sensor_a": {"occlusion_rate": 0.25, "center_noise_sigma": 0.005},
    "sensor_b": {"miss_rate": 0.15, "false_positive_rate": 1.0, "center_noise_sigma": 0.005},
    "offset_b": [0.01, 0.01]})");
  ASSERT_EQ(run_cli({"--config", path("scenario.json"), "simulate", "--out-dir", path("sim")}).code,
            0);
  ASSERT_EQ(run_cli({"--threads", "3", "fuse", "--a", path("sim/detections_a.json"), "--b",
                     path("sim/detections_b.json"), "--out", path("fused.json")})
                .code,
            0);
  ASSERT_EQ(run_cli({"eval", "--dets", path("fused.json"), "--gts", path("sim/ground_truth.json"),
                     "--out", path("report.json")})
                .code,
            0);

  const ScenarioConfig cfg = io::parse_scenario_config(io::read_file(path("scenario.json")));
  const SimulatedData data = generate(cfg);
  const auto fused = fuse_dataset(data.a, data.b, {});
  const EvalReport report = evaluate(as_detections(fused), flatten(data.truth));
  EXPECT_EQ(io::read_file(path("report.json")), io::to_json(report));
}

TEST_F(CliTest, PrCurve) {
  write_five_ninths();
  ASSERT_EQ(run_cli({"eval", "--dets", path("dets.json"), "--gts", path("gts.json"), "--out",
                     path("r1.json")})
                .code,
            0);
  const Outcome csv = run_cli({"pr-curve", "--report", path("r1.json")});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out.substr(0, 17), "recall,precision\n");
  const Outcome svg = run_cli({"pr-curve", "--report", path("r1.json"), "--report",
                               path("r1.json"), "--svg", path("pr.svg")});
  ASSERT_EQ(svg.code, 0) << svg.err;
  EXPECT_NE(io::read_file(path("pr.svg")).find("AP 0.5556"), std::string::npos);
  EXPECT_EQ(run_cli({"pr-curve", "--report", path("r1.json"), "--report", path("r1.json"),
                     "--csv", path("x.csv")})
                .code,
            2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"fuse", "--a", "x"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"fuse", "--a", path("nope.json"), "--b", path("nope.json"), "--out",
                     path("o.json")})
                .code,
            2);
}

TEST_F(CliTest, ExecutableExitCodes) {
  write("broken.json", "{");
  const std::string exe = DDFUSE_CLI_PATH;
  const std::string cmd = "\"" + exe + "\" fuse --a \"" + path("broken.json") + "\" --b \"" +
                          path("broken.json") + "\" --out \"" + path("o.json") +
                          "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_NE(status, -1);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_EQ(WEXITSTATUS(std::system(("\"" + exe + "\" --help >/dev/null").c_str())), 0);
}
