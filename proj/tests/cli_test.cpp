/*
 * Copyright 2026 The t2t Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "t2t/dataset.hpp"
#include "t2t/evaluate.hpp"
#include "t2t/hash.hpp"
#include "t2t/interp.hpp"
#include "t2t/metrics.hpp"
#include "t2t/translate.hpp"

namespace t2t {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code;
  std::string log;
};

CliResult RunCli(const std::vector<std::string>& args) {
  std::ostringstream log;
  const int code = cli::Run(args, log);
  return {code, log.str()};
}

std::vector<std::uint8_t> ReadBytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string ReadText(const fs::path& p) {
  const auto b = ReadBytes(p);
  return std::string(b.begin(), b.end());
}

void WriteFile(const fs::path& p, std::span<const std::uint8_t> bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Every file below `dir` with its digest.
std::map<std::string, std::string> TreeHashes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = Sha256Hex(ReadBytes(e.path()));
  }
  return out;
}

std::pair<int, int> PgmSize(const fs::path& p) {
  std::istringstream in(ReadText(p));
  std::string magic;
  int w = 0, h = 0;
  in >> magic >> w >> h;
  EXPECT_EQ(magic, "P5");
  return {w, h};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::temp_directory_path() / "t2t_cli_test");
    fs::remove_all(*root_);
    fs::create_directories(*root_);
    const auto r = RunCli({"gen", "--corpus", "primitives", "--grid", "1", "--orientations", "1", "--seed", "42",
                           "--out", Corpus()});
    ASSERT_EQ(r.code, 0) << r.log;
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }
  void TearDown() override {
    for (const char* v : {"T2T_SEED", "T2T_THREADS", "T2T_GEN_GRID"}) unsetenv(v);
  }

  static std::string Path(const std::string& name) { return (*root_ / name).string(); }
  static std::string Corpus() { return Path("corpus"); }

  static fs::path* root_;
};

fs::path* CliTest::root_ = nullptr;

TEST_F(CliTest, GenIsReproducible) {
  const auto r = RunCli({"gen", "--corpus", "primitives", "--grid", "1", "--orientations", "1", "--seed", "42",
                         "--out", Path("again")});
  ASSERT_EQ(r.code, 0) << r.log;
  EXPECT_EQ(TreeHashes(Path("again")), TreeHashes(Corpus()));
  EXPECT_NE(r.log.find(Sha256Hex(ReadBytes(fs::path(Corpus()) / "manifest.json"))), std::string::npos);
}

TEST_F(CliTest, GenObjectsCountsGridsTimesKeypoints) {
  const auto r = RunCli({"gen", "--corpus", "objects", "--grid", "1", "--orientations", "1", "--out", Path("obj")});
  ASSERT_EQ(r.code, 0) << r.log;
  const Manifest m = LoadManifest(Path("obj"));
  EXPECT_EQ(m.samples.size(), 20u);
  EXPECT_EQ(m.count(Split::kTest), 20u);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  auto expect_config_error = [](const std::vector<std::string>& args) {
    const auto r = RunCli(args);
    EXPECT_EQ(r.code, cli::kExitConfig) << r.log;
    EXPECT_EQ(std::count(r.log.begin(), r.log.end(), '\n'), 1) << r.log;
    EXPECT_EQ(r.log.rfind("t2t: error exit=2", 0), 0u) << r.log;
  };
  expect_config_error({"gen", "--out", Path("x"), "--config", Path("missing.json")});
  WriteFile(Path("broken.json"), std::string("{\"seed\": "));
  expect_config_error({"gen", "--out", Path("x"), "--config", Path("broken.json")});
  expect_config_error({"gen", "--out", Path("x"), "--corpus", "gel"});
  expect_config_error({"gen", "--out", Path("x"), "--grid", "0"});
  expect_config_error({"gen", "--out", Path("x"), "--bogus"});
  expect_config_error({"train", "--model", "resnet", "--corpus", Corpus(), "--out", Path("m")});
  expect_config_error({});
  setenv("T2T_THREADS", "many", 1);
  expect_config_error({"gen", "--out", Path("x"), "--grid", "1", "--orientations", "1"});
}

TEST_F(CliTest, FlagsOverrideEnvironmentOverrideConfigFile) {
  WriteFile(Path("gen.json"), std::string(R"({"seed": 1, "grid_points_per_side": 1, "orientations_rad": [0.0]})"));
  auto seed_of = [&](const std::vector<std::string>& extra) {
    std::vector<std::string> args{"gen", "--config", Path("gen.json"), "--out", Path("prec")};
    args.insert(args.end(), extra.begin(), extra.end());
    const auto r = RunCli(args);
    EXPECT_EQ(r.code, 0) << r.log;
    return LoadManifest(Path("prec")).config.seed;
  };
  EXPECT_EQ(seed_of({}), 1u);
  setenv("T2T_SEED", "2", 1);
  EXPECT_EQ(seed_of({}), 2u);
  EXPECT_EQ(seed_of({"--seed", "3"}), 3u);
  setenv("T2T_GEN_GRID", "2", 1);
  seed_of({});
  EXPECT_EQ(LoadManifest(Path("prec")).config.grid_points_per_side, 2);
  const json record = json::parse(ReadText(fs::path(Path("prec")) / "run.json"));
  EXPECT_EQ(record["config"]["seed"], 2);
  EXPECT_EQ(record["inputs"][0]["sha256"], Sha256Hex(ReadBytes(Path("gen.json"))));
}

TEST_F(CliTest, LinearTrainingReportsFiniteValidationError) {
  const auto before = TreeHashes(Corpus());
  const auto r = RunCli({"train", "--model", "linear", "--corpus", Corpus(), "--out", Path("lin.t2tm")});
  ASSERT_EQ(r.code, 0) << r.log;
  EXPECT_EQ(TreeHashes(Corpus()), before);
  const TranslatorModel m = LoadModel(Path("lin.t2tm"));
  EXPECT_EQ(m.kind, ModelKind::kLinearBaseline);
  EXPECT_TRUE(std::isfinite(m.meta.best_val_l3));
  const auto pos = r.log.find("val_rmse ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_TRUE(std::isfinite(std::stod(r.log.substr(pos + 9))));
}

TEST_F(CliTest, TrainingIsByteReproducibleAndLogMatchesModel) {
  const std::vector<std::string> common{"train", "--model", "array", "--corpus", Corpus(), "--epochs", "3",
                                        "--seed", "5"};
  auto a = common, b = common;
  a.insert(a.end(), {"--out", Path("a.t2tm")});
  b.insert(b.end(), {"--out", Path("b.t2tm"), "--log", Path("b.curve")});
  ASSERT_EQ(RunCli(a).code, 0);
  ASSERT_EQ(RunCli(b).code, 0);
  EXPECT_EQ(ReadBytes(Path("a.t2tm")), ReadBytes(Path("b.t2tm")));
  EXPECT_EQ(ReadText(Path("a.t2tm.curve.txt")), ReadText(Path("b.curve")));

  std::istringstream curve(ReadText(Path("b.curve")));
  std::string line;
  double min_val = INFINITY;
  int rows = 0;
  while (std::getline(curve, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    int epoch;
    std::string train_loss;
    double val;
    fields >> epoch >> train_loss >> val;
    EXPECT_EQ(epoch, ++rows);
    min_val = std::min(min_val, val);
  }
  EXPECT_EQ(rows, 3);
  EXPECT_EQ(min_val, LoadModel(Path("b.t2tm")).meta.best_val_l3);
}

TEST_F(CliTest, DivergenceExitsFour) {
  const auto r = RunCli({"train", "--model", "array", "--corpus", Corpus(), "--lr", "1e30", "--epochs", "3",
                         "--out", Path("div.t2tm")});
  EXPECT_EQ(r.code, cli::kExitNumeric) << r.log;
  EXPECT_NE(r.log.find("Diverged"), std::string::npos);
}

TEST_F(CliTest, EvalReportTableAndStrips) {
  ASSERT_EQ(RunCli({"train", "--model", "linear", "--corpus", Corpus(), "--out", Path("l.t2tm")}).code, 0);
  ASSERT_EQ(RunCli({"train", "--model", "image", "--corpus", Corpus(), "--epochs", "1", "--out", Path("i.t2tm")})
                .code,
            0);
  const auto before = TreeHashes(Corpus());
  const auto r = RunCli({"eval", "--model", Path("l.t2tm"), "--model", Path("i.t2tm"), "--corpus", Corpus(),
                         "--report", Path("report.json"), "--render", Path("strips"), "--render-limit", "3",
                         "--gutter", "5"});
  ASSERT_EQ(r.code, 0) << r.log;
  EXPECT_EQ(TreeHashes(Corpus()), before);

  const EvalReport report = ReportFromJson(ReadText(Path("report.json")));
  ASSERT_EQ(report.per_sample.size(), 64u);
  for (const EvalRow& row : report.per_sample) {
    EXPECT_NEAR(row.percent_fullscale, 100.0 * row.rmse / 40000.0, 1e-12);
  }
  const auto aggregates = report.Aggregate();
  ASSERT_EQ(aggregates.size(), 4u);  // {train, val} x {linear, image}
  for (const EvalAggregate& a : aggregates) {
    double rmse = 0, ssim = 0, iou = 0;
    std::size_t n = 0;
    for (const EvalRow& row : report.per_sample) {
      if (row.split != a.split || row.model_kind != a.model_kind) continue;
      rmse += row.rmse;
      ssim += row.ssim;
      iou += row.contact_iou;
      ++n;
    }
    EXPECT_EQ(a.count, n);
    EXPECT_NEAR(a.rmse, rmse / n, 1e-9 * (1 + a.rmse));
    EXPECT_NEAR(a.ssim, ssim / n, 1e-12);
    EXPECT_NEAR(a.contact_iou, iou / n, 1e-12);
    EXPECT_NEAR(a.percent_fullscale, 100.0 * a.rmse / 40000.0, 1e-9);
  }

  const std::string table = ReadText(Path("report.txt"));
  for (const char* column : {"model", "split", "rmse", "rmse_%", "ssim", "contact_iou"}) {
    EXPECT_NE(table.find(column), std::string::npos) << column;
  }
  EXPECT_NE(table.find("image_space"), std::string::npos);

  int strips = 0;
  const int panel_width = DefaultModelGeometry().output_grid.cols;
  for (const auto& e : fs::recursive_directory_iterator(Path("strips"))) {
    if (!e.is_regular_file()) continue;
    ++strips;
    const auto [w, h] = PgmSize(e.path());
    EXPECT_EQ(w, 4 * panel_width + 3 * 5);
    EXPECT_EQ(h, DefaultModelGeometry().output_grid.rows);
  }
  EXPECT_EQ(strips, 6);
  EXPECT_NE(r.log.find("truth=["), std::string::npos);
}

TEST_F(CliTest, EvalShapeMismatchExitsFive) {
  ModelGeometry g = DefaultModelGeometry();
  g.input_grid = FitCameraGrid(g.output_grid, 160, 120);
  TrainConfig cfg = DefaultTrainConfig(ModelKind::kArraySpace);
  SaveModel(InitModel(ModelKind::kArraySpace, g, cfg), Path("small.t2tm"));
  const auto r = RunCli({"eval", "--model", Path("small.t2tm"), "--corpus", Corpus(), "--report", Path("bad.json")});
  EXPECT_EQ(r.code, cli::kExitShape) << r.log;
}

TEST_F(CliTest, InterpRoundTripThroughFiles) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(0.0f, 40000.0f);
  const TaxelLayout layout = BuildDefaultLayout();
  for (int trial = 0; trial < 5; ++trial) {
    ArraySample y;
    for (std::size_t i = 0; i < layout.n_taxels(); ++i) y.values.push_back(u(rng));
    WriteFile(Path("y.txl"), EncodeTxl(y));
    ASSERT_EQ(RunCli({"interp", "--to", "image", "--in", Path("y.txl"), "--out", Path("i.pfm")}).code, 0);
    ASSERT_EQ(RunCli({"interp", "--to", "array", "--in", Path("i.pfm"), "--out", Path("back.txl")}).code, 0);
    const ArraySample back = DecodeTxl(ReadBytes(Path("back.txl")));
    ASSERT_EQ(back.size(), y.size());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_LE(std::abs(back.values[i] - y.values[i]), 0.5f);
  }
}

TEST_F(CliTest, FormatErrorsExitThree) {
  WriteFile(Path("junk.txl"), std::string("TXL1 not really"));
  const auto a = RunCli({"interp", "--to", "image", "--in", Path("junk.txl"), "--out", Path("o.pfm")});
  EXPECT_EQ(a.code, cli::kExitIo) << a.log;
  WriteFile(Path("junk.pfm"), std::string("Pf\n3 3\n-1.0\nxx"));
  const auto b = RunCli({"render", "--in", Path("junk.pfm"), "--out", Path("o.pgm")});
  EXPECT_EQ(b.code, cli::kExitIo) << b.log;
  const auto c = RunCli({"interp", "--to", "array", "--in", Path("nothing.pfm"), "--out", Path("o.txl")});
  EXPECT_EQ(c.code, cli::kExitIo) << c.log;
}

TEST_F(CliTest, RenderZeroArrayIsUniformAndStripsHaveFixedWidth) {
  ArraySample zero;
  zero.values.assign(BuildDefaultLayout().n_taxels(), 0.0f);
  WriteFile(Path("zero.txl"), EncodeTxl(zero));
  const auto r = RunCli({"render", "--in", Path("zero.txl"), "--out", Path("zero.pgm")});
  ASSERT_EQ(r.code, 0) << r.log;
  EXPECT_NE(r.log.find("scale ["), std::string::npos);
  const auto bytes = ReadBytes(Path("zero.pgm"));
  const auto [w, h] = PgmSize(Path("zero.pgm"));
  const std::size_t pixels = static_cast<std::size_t>(w) * h;
  ASSERT_GT(bytes.size(), pixels);
  const std::set<std::uint8_t> values(bytes.end() - static_cast<std::ptrdiff_t>(pixels), bytes.end());
  EXPECT_EQ(values.size(), 1u);

  const auto s = RunCli({"render", "--in", Path("zero.txl"), "--in", Path("zero.txl"), "--in", Path("zero.txl"),
                         "--in", Path("zero.txl"), "--gutter", "7", "--out", Path("strip.pgm")});
  ASSERT_EQ(s.code, 0) << s.log;
  EXPECT_EQ(PgmSize(Path("strip.pgm")).first, 4 * w + 3 * 7);
}

TEST(ScoreSampleTest, PerfectPredictionScoresPerfectly) {
  const TaxelLayout layout = BuildDefaultLayout();
  const PixelGrid grid = FitTactileGrid(layout);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0.0f, 40000.0f);
  ArraySample y;
  for (std::size_t i = 0; i < layout.n_taxels(); ++i) y.values.push_back(u(rng));
  y.values[3] = 0.0f;
  const TactileImage truth = Phi(y, layout, grid);
  const EvalRow row = ScoreSample("s", "test", "oracle", y, SampleImages{truth, truth, truth, y});
  EXPECT_EQ(row.rmse, 0.0);
  EXPECT_EQ(row.percent_fullscale, 0.0);
  EXPECT_NEAR(row.ssim, 1.0, 1e-12);
  EXPECT_EQ(row.contact_iou, 1.0);
}

}  // namespace
}  // namespace t2t
