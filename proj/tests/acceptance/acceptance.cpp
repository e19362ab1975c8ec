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

// Runs every acceptance criterion and prints one PASS/FAIL line per
// criterion. Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "t2t/contact.hpp"
#include "t2t/dataset.hpp"
#include "t2t/evaluate.hpp"
#include "t2t/hash.hpp"
#include "t2t/interp.hpp"
#include "t2t/metrics.hpp"
#include "t2t/translate.hpp"

namespace t2t {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string Num(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::vector<std::uint8_t> ReadBytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> TreeHashes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = Sha256Hex(ReadBytes(e.path()));
  }
  return out;
}

int RunCli(const std::vector<std::string>& args) {
  std::ostringstream log;
  const int code = cli::Run(args, log);
  if (code != 0) std::cerr << log.str();
  return code;
}

fs::path WorkDir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "t2t_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path ObjectCorpusDir() { return WorkDir() / "objects"; }

// ----------------------------------------------------------------------------

Outcome FullScalePercentages() {
  Outcome o;
  struct Case {
    double rmse, percent, tol;
  };
  for (const Case& c : {Case{6072, 15.18, 0.01}, Case{4867, 12.17, 0.01}, Case{4007, 10.02, 0.02},
                        Case{3931, 9.83, 0.01}}) {
    const double p = PercentFullScale(c.rmse);
    o.Require(std::abs(p - c.percent) <= c.tol, Num(c.rmse) + " -> " + Num(p, 6));
  }
  return o;
}

Outcome DatasetCounts() {
  Outcome o;
  const auto prims = EnumerateSamples(DefaultDatasetConfig(Corpus::kPrimitives));
  std::map<std::string, int> per_feature;
  std::vector<ContactScene> scenes;
  for (const auto& s : prims) {
    const auto& p = std::get<Primitive>(s.scene.indenter);
    ++per_feature[std::string(KindName(p.kind)) + std::to_string(p.version)];
    scenes.push_back(s.scene);
  }
  o.Require(prims.size() == 18816, "primitive pairs " + std::to_string(prims.size()));
  o.Require(per_feature.size() == 32 && std::all_of(per_feature.begin(), per_feature.end(),
                                                    [](const auto& kv) { return kv.second == 588; }),
            "588 per feature");
  const VersionSplit split = SplitByVersion(scenes);
  bool disjoint = true;
  std::set<std::string> train_features;
  for (auto i : split.train) {
    const auto& p = std::get<Primitive>(scenes[i].indenter);
    train_features.insert(std::string(KindName(p.kind)) + std::to_string(p.version));
  }
  for (auto i : split.val) {
    const auto& p = std::get<Primitive>(scenes[i].indenter);
    disjoint &= train_features.count(std::string(KindName(p.kind)) + std::to_string(p.version)) == 0;
  }
  o.Require(split.train.size() == 14112 && split.val.size() == 4704 && disjoint,
            "split " + std::to_string(split.train.size()) + "/" + std::to_string(split.val.size()) +
                (disjoint ? " version-disjoint" : " overlapping"));

  const auto objects = EnumerateSamples(DefaultDatasetConfig(Corpus::kObjects));
  std::map<std::pair<int, int>, int> per_grid;
  for (const auto& s : objects) {
    const auto& c = std::get<ObjectContact>(s.scene.indenter);
    ++per_grid[{static_cast<int>(c.object), c.keypoint}];
  }
  o.Require(objects.size() == 1260 && per_grid.size() == 20 &&
                std::all_of(per_grid.begin(), per_grid.end(), [](const auto& kv) { return kv.second == 63; }),
            "object pairs " + std::to_string(objects.size()) + ", 63 per grid");

  // Full object corpus through the command line; reused by the experiment.
  const int code = RunCli({"gen", "--corpus", "objects", "--seed", "7", "--out", ObjectCorpusDir().string()});
  const std::size_t written = code == 0 ? LoadManifest(ObjectCorpusDir()).samples.size() : 0;
  o.Require(written == 1260, "gen objects manifest " + std::to_string(written));
  return o;
}

Outcome PhiRoundTrip() {
  Outcome o;
  const TaxelLayout layout = BuildDefaultLayout();
  const PhiOperator phi(layout, FitTactileGrid(layout));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<float> u(0.0f, static_cast<float>(kFullScale));
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    ArraySample y;
    y.layout_id = layout.id();
    for (std::size_t i = 0; i < layout.n_taxels(); ++i) {
      const auto pick = rng() % 10;
      y.values.push_back(pick == 0 ? 0.0f : pick == 1 ? static_cast<float>(kFullScale) : u(rng));
    }
    const ArraySample back = PhiInv(phi.Apply(y), layout);
    for (std::size_t i = 0; i < y.size(); ++i) {
      worst = std::max(worst, static_cast<double>(std::abs(back.values[i] - y.values[i])));
    }
  }
  o.Require(worst <= 0.5, "max |phi_inv(phi(y)) - y| = " + Num(worst) + " counts over 1000 arrays");
  return o;
}

Outcome ForceBalance() {
  Outcome o;
  const ElasticLayer layer;
  const TaxelLayout layout = BuildDefaultLayout();
  const PixelGrid camera = CameraGrid(layout);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(-6.0, 6.0), angle(0.0, 2.0 * std::numbers::pi - 1e-9),
      force(1.0, 12.0);
  double worst = 0.0;
  std::set<PrimitiveKind> kinds;
  for (int i = 0; i < 200; ++i) {
    const PrimitiveKind kind = kAllPrimitiveKinds[i % kAllPrimitiveKinds.size()];
    kinds.insert(kind);
    const ContactScene scene{MakePrimitive(kind, 1 + static_cast<int>(rng() % kVersionsPerKind)),
                             {pos(rng), pos(rng)}, angle(rng), force(rng)};
    const TactileImage p = PressureField(scene, layer, camera);
    worst = std::max(worst, std::abs(p.Sum() * camera.PixelArea() - scene.force) / scene.force);
  }
  o.Require(worst <= 1e-3 && kinds.size() == 8,
            "max |sum p*A - F| / F = " + Num(worst) + " over 200 scenes, " + std::to_string(kinds.size()) +
                " kinds");

  // Flat circular punch: uniform pressure F / A over the contact, so the
  // penetration is F / (k A).
  const PixelGrid grid{200, 200, {-9.95, -9.95}, 0.1, 0.1};
  const Primitive disk = MakePrimitive(PrimitiveKind::kCircle, 4);
  double worst_delta = 0.0;
  for (double f : {1.0, 4.0, 8.0, 16.0}) {
    const double delta = SolvePenetration(ContactScene{disk, {}, 0.0, f}, layer, grid);
    const double closed = f / (layer.stiffness * std::numbers::pi * disk.a * disk.a);
    worst_delta = std::max(worst_delta, std::abs(delta - closed));
  }
  o.Require(worst_delta <= 1e-3, "flat punch penetration error " + Num(worst_delta) + " mm");
  return o;
}

double GradientRelativeError(ModelKind kind, std::uint64_t seed) {
  const ModelGeometry geometry = DefaultModelGeometry();
  TrainConfig cfg = DefaultTrainConfig(kind);
  cfg.seed = seed;
  cfg.downsample = 16;
  cfg.channels = kind == ModelKind::kImageSpace ? std::vector<int>{2, 3, 3, 2} : std::vector<int>{3, 3, 4, 5, 4};
  const TranslatorModel m = InitModel(kind, geometry, cfg);
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<float> ux(0.0f, 1.0f), uy(0.0f, static_cast<float>(kFullScale));
  TactileImage x(m.model_grid());
  for (float& v : x.data()) v = ux(rng);
  ArraySample y;
  y.layout_id = m.layout.id();
  for (std::size_t i = 0; i < m.n_taxels(); ++i) y.values.push_back(uy(rng));
  BackwardOptions opt;
  opt.recon_weight = kind == ModelKind::kImageSpace ? 1.0 : 0.0;

  std::vector<double> p(m.parameters.begin(), m.parameters.end());
  std::vector<double> g(p.size(), 0.0);
  TrainingLoss(m, p, x, y, opt, g);
  const double h = 1e-3;
  double diff = 0.0, norm_fd = 0.0, norm_g = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double lp = TrainingLoss(m, p, x, y, opt);
    p[i] = saved - h;
    const double lm = TrainingLoss(m, p, x, y, opt);
    p[i] = saved;
    const double fd = (lp - lm) / (2 * h);
    diff += (fd - g[i]) * (fd - g[i]);
    norm_fd += fd * fd;
    norm_g += g[i] * g[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(std::max(norm_fd, norm_g)), 1e-300);
}

Outcome GradientCheck() {
  Outcome o;
  for (ModelKind kind : {ModelKind::kArraySpace, ModelKind::kImageSpace}) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) worst = std::max(worst, GradientRelativeError(kind, seed));
    o.Require(worst < 1e-4, std::string(ModelKindName(kind)) + " max relative error " + Num(worst));
  }
  return o;
}

// ----------------------------------------------------------------------------

constexpr int kExperimentDownsample = 4;

DatasetConfig ExperimentPrimitiveConfig() {
  DatasetConfig cfg = DefaultDatasetConfig(Corpus::kPrimitives);
  cfg.grid_points_per_side = 4;
  cfg.grid_scale = 1.1 / 3.0;  // same 1.1-footprint span as the 7x7 grid
  cfg.orientations = EvenOrientations(6);
  cfg.seed = 11;
  return cfg;
}

std::vector<TrainingPair> Pairs(const std::vector<PairedSample>& samples, const std::vector<std::size_t>& idx) {
  std::vector<TrainingPair> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back({samples[i].x, samples[i].y});
  return out;
}

std::vector<PairedSample> Subset(const std::vector<PairedSample>& samples, const std::vector<std::size_t>& idx) {
  std::vector<PairedSample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(samples[i]);
  return out;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

Outcome EndToEnd() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const DatasetConfig cfg = ExperimentPrimitiveConfig();
  const auto primitives = SimulateCorpus(
      cfg, [](const TactileImage& x) { return Downsample(x, kExperimentDownsample); });
  const VersionSplit split = SplitByVersion(std::span<const PairedSample>(primitives));
  const auto train = Pairs(primitives, split.train);
  const auto val = Pairs(primitives, split.val);
  const auto val_samples = Subset(primitives, split.val);
  LoadOptions load;
  load.downsample = kExperimentDownsample;
  const auto objects = LoadCorpus(ObjectCorpusDir(), load);
  std::cout << "  corpus: " << train.size() << " train / " << val.size() << " val primitives, "
            << objects.size() << " objects (" << Num(Seconds(t0), 3) << " s)\n";

  const ModelGeometry geometry{CameraGrid(cfg.layout), cfg.layout, FitTactileGrid(cfg.layout)};
  std::map<ModelKind, TranslatorModel> models;
  for (ModelKind kind : {ModelKind::kImageSpace, ModelKind::kArraySpace}) {
    const auto t = std::chrono::steady_clock::now();
    TrainConfig tc = DefaultTrainConfig(kind);
    tc.downsample = kExperimentDownsample;
    tc.seed = 3;
    TrainLog log;
    models.emplace(kind, Train(kind, tc, train, val, geometry, &log));
    std::cout << "  " << ModelKindName(kind) << ": " << log.val_l3.size() << " epochs, best " << log.best_epoch
              << " (" << Num(Seconds(t), 3) << " s)\n";
  }

  // Linear baseline with the ridge chosen on validation.
  const auto tl = std::chrono::steady_clock::now();
  const LinearDesign design(train, geometry, kExperimentDownsample);
  double linear_val = INFINITY, best_alpha = 0.0;
  for (double alpha : {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
    const TranslatorModel lin = design.Solve(alpha * design.GramScale());
    const std::vector<TranslatorModel> one{lin};
    const auto agg = Evaluate(one, val_samples).Aggregate();
    if (agg.front().rmse < linear_val) {
      linear_val = agg.front().rmse;
      best_alpha = alpha;
    }
  }
  std::cout << "  linear_baseline: ridge " << Num(best_alpha) << " x gram scale, val rmse " << Num(linear_val, 6)
            << " (" << Num(Seconds(tl), 3) << " s)\n";

  const std::vector<TranslatorModel> nets{models.at(ModelKind::kImageSpace), models.at(ModelKind::kArraySpace)};
  const auto test = Evaluate(nets, objects).Aggregate();
  const auto valid = Evaluate(nets, val_samples).Aggregate();
  std::map<std::string, EvalAggregate> on_test, on_val;
  for (const auto& a : test) on_test[a.model_kind] = a;
  for (const auto& a : valid) on_val[a.model_kind] = a;
  for (const auto& [name, a] : on_test) {
    std::cout << "  " << name << " test: rmse " << Num(a.rmse, 6) << " (" << Num(a.percent_fullscale) << "%), ssim "
              << Num(a.ssim) << ", contact_iou " << Num(a.contact_iou) << "; val rmse " << Num(on_val[name].rmse, 6)
              << "\n";
  }

  const auto& img = on_test.at("image_space");
  const auto& arr = on_test.at("array_space");
  o.Require(img.percent_fullscale < 20.0 && arr.percent_fullscale < 20.0,
            "(a) test rmse " + Num(img.percent_fullscale) + "% / " + Num(arr.percent_fullscale) + "% of fullscale");
  o.Require(img.contact_iou >= arr.contact_iou,
            "(b) contact iou image " + Num(img.contact_iou) + " vs array " + Num(arr.contact_iou));
  o.Require(on_val.at("image_space").rmse < linear_val && on_val.at("array_space").rmse < linear_val,
            "(c) val rmse image " + Num(on_val.at("image_space").rmse, 6) + ", array " +
                Num(on_val.at("array_space").rmse, 6) + " vs linear " + Num(linear_val, 6));
  o.detail += "; " + Num(Seconds(t0), 4) + " s";
  return o;
}

Outcome Determinism() {
  Outcome o;
  const fs::path a = WorkDir() / "det_a", b = WorkDir() / "det_b";
  const std::vector<std::string> gen{"gen", "--corpus", "primitives", "--grid", "2", "--orientations", "2",
                                     "--seed", "42"};
  auto with = [](std::vector<std::string> args, std::initializer_list<std::string> more) {
    args.insert(args.end(), more);
    return args;
  };
  const bool gen_ok = RunCli(with(gen, {"--out", a.string()})) == 0 && RunCli(with(gen, {"--out", b.string()})) == 0;
  o.Require(gen_ok && ReadBytes(a / "manifest.json") == ReadBytes(b / "manifest.json") &&
                TreeHashes(a) == TreeHashes(b),
            "gen manifests and samples identical");
  for (const char* model : {"image", "array", "linear"}) {
    const std::vector<std::string> train{"train", "--model", model, "--corpus", a.string(), "--epochs", "3",
                                         "--seed", "9"};
    const fs::path m1 = WorkDir() / (std::string(model) + "_1.t2tm");
    const fs::path m2 = WorkDir() / (std::string(model) + "_2.t2tm");
    const bool ok = RunCli(with(train, {"--out", m1.string()})) == 0 && RunCli(with(train, {"--out", m2.string()})) == 0;
    o.Require(ok && ReadBytes(m1) == ReadBytes(m2), std::string(model) + " model files identical");
  }
  return o;
}

Outcome SsimSanity() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> u(0.0f, static_cast<float>(kFullScale));
  double worst_self = 0.0, worst_sym = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 11 + static_cast<int>(rng() % 30), cols = 11 + static_cast<int>(rng() % 30);
    const PixelGrid grid{rows, cols, {0.0, 0.0}, 1.0, 1.0};
    TactileImage a(grid), b(grid);
    for (float& v : a.data()) v = u(rng);
    for (float& v : b.data()) v = u(rng);
    worst_self = std::max(worst_self, std::abs(Ssim(a, a) - 1.0));
    worst_sym = std::max(worst_sym, std::abs(Ssim(a, b) - Ssim(b, a)));
  }
  o.Require(worst_self <= 1e-9, "|ssim(a, a) - 1| <= " + Num(worst_self));
  o.Require(worst_sym <= 1e-9, "|ssim(a, b) - ssim(b, a)| <= " + Num(worst_sym));

  const PixelGrid grid{20, 24, {0.0, 0.0}, 1.0, 1.0};
  const double c1 = std::pow(0.01 * kFullScale, 2);
  double worst_const = 0.0;
  for (auto [x, y] : {std::pair{0.0, 0.0}, {100.0, 30000.0}, {20000.0, 20000.0}, {40000.0, 1.0}}) {
    const double closed = (2 * x * y + c1) / (x * x + y * y + c1);
    const double got = Ssim(TactileImage(grid, static_cast<float>(x)), TactileImage(grid, static_cast<float>(y)));
    worst_const = std::max(worst_const, std::abs(got - closed));
  }
  o.Require(worst_const <= 1e-9, "constant-image closed form error " + Num(worst_const));
  return o;
}

}  // namespace
}  // namespace t2t

int main() {
  using namespace t2t;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fullscale percentages", FullScalePercentages},
      {"dataset counts", DatasetCounts},
      {"phi round trip", PhiRoundTrip},
      {"contact force balance", ForceBalance},
      {"gradient correctness", GradientCheck},
      {"end-to-end experiment", EndToEnd},
      {"determinism", Determinism},
      {"ssim sanity", SsimSanity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    failures += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << outcome.detail << std::endl;
  }
  std::error_code ec;
  std::filesystem::remove_all(WorkDir(), ec);
  return failures == 0 ? 0 : 1;
}
