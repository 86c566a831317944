#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "topomap/pipeline.hpp"

using namespace topomap;
namespace fs = std::filesystem;
namespace tp = topomap::pipeline;

namespace {

const fs::path kData = TOPOMAP_TEST_DATA_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("topomap_test_" + name);
  fs::remove_all(p);
  return p;
}

tp::RunOptions small_run(const fs::path& out, const fs::path& scenario = kData / "small.ini") {
  tp::RunOptions o;
  o.scenario = scenario;
  o.seed = 3;
  o.out = out;
  return o;
}

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5}) {
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(kInfinity), "inf");
  EXPECT_TRUE(std::isinf(io::parse_double("inf")));
  EXPECT_THROW(io::parse_double("1.5x"), std::runtime_error);
}

TEST(Format, Sha256) {
  EXPECT_EQ(io::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Csv, EventsAndStaticsRoundTrip) {
  const std::vector<EncounterEvent> events{{0.1, 0.30000000000000004, 1, 4, 0}, {2.0, 2.0, 0, 3, 1}};
  const auto text = io::events_csv(events, "h");
  EXPECT_TRUE(text.starts_with("# config_hash=h\nindex,t0,t1,id_a,id_b\n"));
  EXPECT_EQ(io::read_events(text), events);

  const StaticIntervalLog log{{3, {{0.0, 10.5}, {20.0, 1.0 / 3.0}}}};
  EXPECT_EQ(io::read_static(io::static_csv(log, "h")), log);
}

TEST(Csv, DiagramRoundTripWithInfinity) {
  PersistenceDiagram d;
  d[0] = {{0.0, 1.5}, {0.0, kInfinity}};
  d[1] = {{1.0, std::sqrt(2.0)}};
  const auto text = io::diagram_csv(d, "h");
  EXPECT_NE(text.find("0,0,inf"), std::string::npos);
  EXPECT_EQ(io::read_diagram(text).dims, d.dims);
}

TEST(Csv, RejectsWrongHeader) {
  EXPECT_THROW(io::read_events("t,x\n1,2\n"), std::runtime_error);
}

TEST(Svg, DiagramColorsAndThreshold) {
  PersistenceDiagram d;
  d[0] = {{0.0, 1.0}, {0.0, kInfinity}};
  d[1] = {{1.0, 1.4}};
  const auto s = svg::persistence_diagram(d, 0.2, "h");
  EXPECT_EQ(occurrences(s, "fill=\"blue\""), 2u);
  EXPECT_EQ(occurrences(s, "fill=\"red\""), 1u);
  EXPECT_EQ(occurrences(s, "class=\"threshold\""), 1u);
  EXPECT_NE(s.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(s.find("config_hash=h"), std::string::npos);
}

TEST(Svg, SketchHighlightsHoles) {
  svg::ComponentView v;
  for (int k = 0; k < 8; ++k) {
    const double a = k * std::numbers::pi / 4;
    v.points.push_back({static_cast<std::size_t>(k), std::cos(a), std::sin(a), 0.0});
  }
  v.diagram[0] = {{0.0, kInfinity}};
  v.diagram[1] = {{0.8, 1.9}};
  v.threshold = 0.5;
  const auto s = svg::local_sketch({v}, "h");
  EXPECT_EQ(occurrences(s, "class=\"hole\""), 1u);
  EXPECT_EQ(occurrences(s, "class=\"point\""), 8u);
  v.threshold = 2.0;
  EXPECT_EQ(occurrences(svg::local_sketch({v}, "h"), "class=\"hole\""), 0u);
}

TEST(Svg, EmptyMapPlaceholder) {
  const auto s = svg::local_sketch({}, "h");
  EXPECT_NE(s.find("class=\"placeholder\""), std::string::npos);
  EXPECT_NE(svg::persistence_diagram({}, 0.1, "h").find("placeholder"), std::string::npos);
}

TEST(Svg, GlobalPanelsAndSeamBands) {
  svg::GlobalView g;
  g.windows = 4;
  for (std::size_t i = 1; i <= 4; ++i) g.nodes.push_back({i, 0, 0});
  for (std::size_t i = 1; i < 4; ++i) g.edges.push_back({i, 0, i - 1, i});
  g.components = 1;
  const auto s = svg::global_map(g, "h");
  EXPECT_EQ(occurrences(s, "class=\"panel\""), 4u);
  EXPECT_EQ(occurrences(s, "class=\"seam\""), 3u);
  EXPECT_EQ(occurrences(s, "class=\"connection\""), 3u);
}

class PipelineRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    out_ = new fs::path(scratch("pipeline"));
    report_ = new tp::RunReport(tp::run_pipeline(small_run(*out_)));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*out_);
    delete out_;
    delete report_;
  }
  static fs::path* out_;
  static tp::RunReport* report_;
};

fs::path* PipelineRun::out_ = nullptr;
tp::RunReport* PipelineRun::report_ = nullptr;

TEST_F(PipelineRun, WritesExpectedLayout) {
  EXPECT_TRUE(fs::exists(*out_ / "manifest.json"));
  EXPECT_TRUE(fs::exists(*out_ / "timings.json"));
  EXPECT_FALSE(fs::exists(*out_ / tp::kPartialMarker));
  EXPECT_TRUE(fs::exists(*out_ / "events.csv"));
  EXPECT_TRUE(fs::exists(*out_ / "static_intervals.csv"));
  EXPECT_TRUE(fs::exists(*out_ / "global_map.json"));
  EXPECT_TRUE(fs::exists(*out_ / "global_map.svg"));
  EXPECT_TRUE(fs::exists(*out_ / "seam_1/dendrogram.csv"));
  for (int i = 1; i <= 2; ++i) {
    const fs::path w = *out_ / ("window_" + std::to_string(i));
    EXPECT_TRUE(fs::exists(w / "sketch.svg"));
    EXPECT_TRUE(fs::exists(w / "component_0/points.csv"));
    EXPECT_TRUE(fs::exists(w / "component_0/diagram.csv"));
    EXPECT_TRUE(fs::exists(w / "component_0/diagram.svg"));
  }
  EXPECT_EQ(report_->maps->local_maps.size(), 2u);
}

TEST_F(PipelineRun, EveryArtifactCarriesTheConfigHashAndIsListed) {
  const auto manifest = nlohmann::json::parse(io::read_file(*out_ / "manifest.json"));
  const std::string hash = manifest.at("config_hash");
  EXPECT_EQ(hash, report_->config_hash);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(*out_)) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const std::string rel = fs::relative(entry.path(), *out_).string();
    EXPECT_NE(io::read_file(entry.path()).find(hash), std::string::npos) << rel;
    if (rel == "manifest.json" || rel == "timings.json") continue;
    ASSERT_TRUE(manifest.at("artifacts").contains(rel)) << rel;
    EXPECT_EQ(manifest.at("artifacts").at(rel), io::sha256_hex(io::read_file(entry.path())));
  }
  EXPECT_EQ(files, manifest.at("artifacts").size() + 2);
}

TEST_F(PipelineRun, RecordsParameters) {
  const auto manifest = nlohmann::json::parse(io::read_file(*out_ / "manifest.json"));
  EXPECT_EQ(manifest.at("parameters").at("tda").at("static_zeroing"), "same_static_interval");
  EXPECT_EQ(manifest.at("seed"), 3);
  EXPECT_EQ(manifest.at("parameters").at("tda").at("cluster_cutoff"), 50.0);
}

TEST_F(PipelineRun, SecondRunIsByteIdentical) {
  const fs::path again = scratch("pipeline_again");
  const auto second = tp::run_pipeline(small_run(again));
  EXPECT_EQ(second.artifacts, report_->artifacts);
  EXPECT_EQ(io::read_file(again / "manifest.json"), io::read_file(*out_ / "manifest.json"));
  fs::remove_all(again);
}

TEST_F(PipelineRun, ReplayMatches) {
  const fs::path out = scratch("replay");
  const auto outcome = tp::replay(*out_ / "manifest.json", out);
  EXPECT_TRUE(outcome.matched);
  EXPECT_TRUE(outcome.mismatches.empty());
  fs::remove_all(out);
}

TEST_F(PipelineRun, ReplayWithNewSeedMakesNewManifest) {
  const fs::path out = scratch("replay_seed");
  const auto outcome = tp::replay(*out_ / "manifest.json", out, 99);
  EXPECT_TRUE(outcome.matched);
  EXPECT_NE(outcome.report.config_hash, report_->config_hash);
  EXPECT_EQ(nlohmann::json::parse(io::read_file(out / "manifest.json")).at("seed"), 99);
  fs::remove_all(out);
}

TEST_F(PipelineRun, RenderReproducesSvgs) {
  const std::string before = io::read_file(*out_ / "window_1/sketch.svg");
  const std::string global = io::read_file(*out_ / "global_map.svg");
  fs::remove(*out_ / "window_1/sketch.svg");
  EXPECT_GE(tp::render(*out_), 4u);
  EXPECT_EQ(io::read_file(*out_ / "window_1/sketch.svg"), before);
  EXPECT_EQ(io::read_file(*out_ / "global_map.svg"), global);
}

TEST_F(PipelineRun, MapStageFromSimulateOutput) {
  const fs::path sim = scratch("sim_only"), mapped = scratch("mapped");
  tp::run_pipeline(small_run(sim), false);
  EXPECT_FALSE(fs::exists(sim / "global_map.json"));
  EXPECT_EQ(io::read_file(sim / "events.csv"), io::read_file(*out_ / "events.csv"));
  const auto r = tp::run_map(small_run(mapped), sim);
  EXPECT_EQ(r.maps->global.components, report_->maps->global.components);
  EXPECT_EQ(io::read_file(mapped / "global_map.json"), io::read_file(*out_ / "global_map.json"));
  fs::remove_all(sim);
  fs::remove_all(mapped);
}

TEST(Replay, EditedScenarioIsHashMismatch) {
  const fs::path dir = scratch("edited");
  fs::create_directories(dir);
  const fs::path scenario = dir / "scenario.ini";
  fs::copy_file(kData / "small.ini", scenario);
  auto opts = small_run(dir / "out", scenario);
  tp::run_pipeline(opts, false);
  io::write_file(scenario, io::read_file(scenario) + "# edited\n");
  try {
    tp::replay(dir / "out/manifest.json", dir / "replay");
    FAIL() << "expected a mismatch";
  } catch (const tp::StageError& e) {
    EXPECT_EQ(e.code(), tp::kReplayMismatch);
  }
  fs::remove_all(dir);
}

TEST(Pipeline, InvalidScenarioIsValidationError) {
  const fs::path out = scratch("invalid");
  try {
    tp::run_pipeline(small_run(out, kData / "invalid.ini"));
    FAIL() << "expected a validation error";
  } catch (const tp::StageError& e) {
    EXPECT_EQ(e.code(), tp::kValidation);
    EXPECT_EQ(e.stage(), "validate");
    EXPECT_NE(std::string(e.what()).find("exceed the leader speed"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(out / "manifest.json"));
}

TEST(Pipeline, FailureLeavesPartialMarker) {
  const fs::path out = scratch("partial");
  auto opts = small_run(out);
  opts.overrides.cutoff = 50.0;
  tp::run_pipeline(opts, false);
  fs::remove(out / "events.csv");
  EXPECT_THROW(tp::run_map(small_run(out / "mapped"), out), tp::StageError);
  EXPECT_TRUE(fs::exists(out / "mapped" / tp::kPartialMarker));
  EXPECT_FALSE(fs::exists(out / "mapped/manifest.json"));
  fs::remove_all(out);
}

TEST(Pipeline, OverridesChangeHashAndParameters) {
  const fs::path a = scratch("ov_a"), b = scratch("ov_b");
  auto opts = small_run(a);
  const auto base = tp::run_pipeline(opts, false);
  opts.out = b;
  opts.overrides.static_zeroing = StaticZeroing::Strict;
  opts.overrides.windows = 3;
  const auto changed = tp::run_pipeline(opts, false);
  EXPECT_NE(base.config_hash, changed.config_hash);
  const auto m = nlohmann::json::parse(io::read_file(b / "manifest.json"));
  EXPECT_EQ(m.at("parameters").at("tda").at("static_zeroing"), "strict");
  EXPECT_EQ(m.at("parameters").at("windows").at("count"), 3);
  EXPECT_EQ(m.at("overrides").at("windows"), 3);
  fs::remove_all(a);
  fs::remove_all(b);
}
