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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "t2t/dataset.hpp"
#include "t2t/evaluate.hpp"
#include "t2t/hash.hpp"
#include "t2t/image_io.hpp"
#include "t2t/interp.hpp"
#include "t2t/translate.hpp"

namespace t2t::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view CategoryName(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kIo:
      return "io";
    case ErrorCategory::kNumeric:
      return "numeric";
    case ErrorCategory::kShape:
      return "shape";
  }
  return "unknown";
}

int ReportError(std::ostream& log, int code, std::string_view category, const std::string& message) {
  // The message is JSON-escaped so the report always fits on one line.
  log << "t2t: error exit=" << code << " category=" << category << " message=" << json(message).dump()
      << "\n";
  return code;
}

std::vector<std::uint8_t> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return bytes;
}

void WriteBytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

void WriteText(const fs::path& path, const std::string& text) {
  WriteBytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string FileSha256(const fs::path& path) { return Sha256Hex(ReadBytes(path)); }

// Lowest-precedence layer of every subcommand's settings.
json LoadConfigFile(const std::optional<std::string>& path) {
  if (!path) return json::object();
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + *path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config file " + *path + " is not a JSON object");
  return j;
}

template <typename T>
void Overlay(json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

void WriteRunRecord(const fs::path& path, std::string_view command, const json& config,
                    const std::vector<fs::path>& inputs) {
  json record = {{"command", command}, {"config", config}, {"inputs", json::array()}};
  for (const fs::path& p : inputs) {
    record["inputs"].push_back({{"path", p.generic_string()}, {"sha256", FileSha256(p)}});
  }
  WriteText(path, record.dump(2) + "\n");
}

std::string Fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string Exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string FormatScale(const PgmScale& s) { return "[" + Exact(s.min) + ", " + Exact(s.max) + "]"; }

TaxelLayout LayoutOrDefault(const std::optional<std::string>& path) {
  return path ? LoadLayout(*path) : BuildDefaultLayout();
}

// ---------------------------------------------------------------- gen

struct GenFlags {
  std::optional<std::string> config;
  std::optional<std::string> corpus;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> orientations;
  std::optional<double> force;
  std::optional<bool> noise;
  std::string out;
};

void AddGen(CLI::App& app, GenFlags& f) {
  CLI::App* c = app.add_subcommand("gen", "Simulate a paired corpus and write it with a manifest");
  c->add_option("--out", f.out, "Output corpus directory")->required()->envname("T2T_GEN_OUT");
  c->add_option("--config", f.config, "JSON dataset config")->envname("T2T_GEN_CONFIG");
  c->add_option("--corpus", f.corpus, "primitives | objects")->envname("T2T_GEN_CORPUS");
  c->add_option("--seed", f.seed, "Noise seed")->envname("T2T_SEED");
  c->add_option("--grid", f.grid, "Grid points per side")->envname("T2T_GEN_GRID");
  c->add_option("--orientations", f.orientations, "Evenly spaced orientations in [0, 7pi/4]")
      ->envname("T2T_GEN_ORIENTATIONS");
  c->add_option("--force", f.force, "Normal force in N")->envname("T2T_GEN_FORCE");
  c->add_option("--noise", f.noise, "Sensor noise on or off")->envname("T2T_GEN_NOISE");
}

int CmdGen(const GenFlags& f, std::ostream& log) {
  json j = LoadConfigFile(f.config);
  Overlay(j, "corpus", f.corpus);
  Overlay(j, "seed", f.seed);
  Overlay(j, "grid_points_per_side", f.grid);
  Overlay(j, "force_n", f.force);
  Overlay(j, "noise", f.noise);
  if (f.orientations) j["orientations_rad"] = EvenOrientations(*f.orientations);
  const DatasetConfig cfg = DatasetConfigFromJson(j.dump());

  const fs::path out(f.out);
  const Manifest manifest = GenerateCorpus(cfg, out);
  std::vector<fs::path> inputs;
  if (f.config) inputs.emplace_back(*f.config);
  WriteRunRecord(out / "run.json", "gen", json::parse(DatasetConfigToJson(cfg)), inputs);
  log << "gen: " << manifest.samples.size() << " samples (train " << manifest.count(Split::kTrain) << ", val "
      << manifest.count(Split::kVal) << ", test " << manifest.count(Split::kTest) << ") in " << out.string()
      << "\n";
  log << "gen: manifest sha256 " << FileSha256(out / "manifest.json") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
  std::string model;
  std::string corpus;
  std::string out;
  std::optional<std::string> curve;
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch;
  std::optional<int> patience;
  std::optional<int> downsample;
  std::optional<double> lr;
  std::optional<double> lr_decay;
  std::optional<double> ridge;
  std::optional<double> recon_weight;
};

void AddTrain(CLI::App& app, TrainFlags& f) {
  CLI::App* c = app.add_subcommand("train", "Train a translator on a primitive corpus");
  c->add_option("--model", f.model, "image | array | linear")
      ->required()
      ->check(CLI::IsMember({"image", "array", "linear"}))
      ->envname("T2T_TRAIN_MODEL");
  c->add_option("--corpus", f.corpus, "Corpus directory")->required()->envname("T2T_TRAIN_CORPUS");
  c->add_option("--out", f.out, "Model file")->required()->envname("T2T_TRAIN_OUT");
  c->add_option("--log", f.curve, "Training curve (default <out>.curve.txt)")->envname("T2T_TRAIN_LOG");
  c->add_option("--config", f.config, "JSON train config")->envname("T2T_TRAIN_CONFIG");
  c->add_option("--seed", f.seed, "Initialization and shuffle seed")->envname("T2T_SEED");
  c->add_option("--epochs", f.epochs, "Maximum epochs")->envname("T2T_TRAIN_EPOCHS");
  c->add_option("--batch", f.batch, "Minibatch size")->envname("T2T_TRAIN_BATCH");
  c->add_option("--patience", f.patience, "Early stopping patience")->envname("T2T_TRAIN_PATIENCE");
  c->add_option("--downsample", f.downsample, "Input downsampling factor")->envname("T2T_TRAIN_DOWNSAMPLE");
  c->add_option("--lr", f.lr, "Adam learning rate")->envname("T2T_TRAIN_LR");
  c->add_option("--lr-decay", f.lr_decay, "Per-epoch learning rate factor")->envname("T2T_TRAIN_LR_DECAY");
  c->add_option("--ridge", f.ridge, "Ridge penalty of the linear baseline")->envname("T2T_TRAIN_RIDGE");
  c->add_option("--recon-weight", f.recon_weight, "Image reconstruction weight")
      ->envname("T2T_TRAIN_RECON_WEIGHT");
}

ModelKind ModelFlag(const std::string& name) {
  if (name == "image") return ModelKind::kImageSpace;
  if (name == "array") return ModelKind::kArraySpace;
  if (name == "linear") return ModelKind::kLinearBaseline;
  return ModelKindFromName(name);
}

ModelGeometry CorpusGeometry(const Manifest& manifest) {
  const TaxelLayout& layout = manifest.config.layout;
  return ModelGeometry{CameraGrid(layout), layout, FitTactileGrid(layout)};
}

std::vector<TrainingPair> LoadPairs(const fs::path& corpus, Split split, int downsample) {
  LoadOptions opt;
  opt.split = split;
  opt.downsample = downsample;
  std::vector<TrainingPair> pairs;
  for (PairedSample& s : LoadCorpus(corpus, opt)) pairs.push_back({std::move(s.x), std::move(s.y)});
  return pairs;
}

int CmdTrain(const TrainFlags& f, std::ostream& log) {
  const ModelKind kind = ModelFlag(f.model);
  json j = json::parse(TrainConfigToJson(DefaultTrainConfig(kind)));
  j.merge_patch(LoadConfigFile(f.config));
  Overlay(j, "seed", f.seed);
  Overlay(j, "max_epochs", f.epochs);
  Overlay(j, "batch_size", f.batch);
  Overlay(j, "patience", f.patience);
  Overlay(j, "downsample", f.downsample);
  Overlay(j, "learning_rate", f.lr);
  Overlay(j, "lr_decay", f.lr_decay);
  Overlay(j, "ridge", f.ridge);
  Overlay(j, "recon_weight", f.recon_weight);
  const TrainConfig cfg = TrainConfigFromJson(j.dump());

  const fs::path corpus(f.corpus);
  const Manifest manifest = LoadManifest(corpus);
  const auto train = LoadPairs(corpus, Split::kTrain, cfg.downsample);
  const auto val = LoadPairs(corpus, Split::kVal, cfg.downsample);
  log << "train: " << ModelKindName(kind) << " on " << train.size() << " train / " << val.size()
      << " val pairs\n";

  TrainLog history;
  const TranslatorModel model = Train(kind, cfg, train, val, CorpusGeometry(manifest), &history);

  const fs::path out(f.out);
  SaveModel(model, out);
  std::string curve = "# epoch train_loss val_l3\n";
  for (std::size_t e = 0; e < history.val_l3.size(); ++e) {
    const std::string loss = e < history.train_loss.size() ? Exact(history.train_loss[e]) : "-";
    curve += std::to_string(e + 1) + " " + loss + " " + Exact(history.val_l3[e]) + "\n";
  }
  WriteText(f.curve ? fs::path(*f.curve) : fs::path(out.string() + ".curve.txt"), curve);
  std::vector<fs::path> inputs{corpus / "manifest.json"};
  if (f.config) inputs.emplace_back(*f.config);
  json record_cfg = json::parse(TrainConfigToJson(cfg));
  record_cfg["model"] = ModelKindName(kind);
  WriteRunRecord(out.string() + ".run.json", "train", record_cfg, inputs);

  const double val_rmse = std::sqrt(model.meta.best_val_l3 / static_cast<double>(model.n_taxels()));
  log << "train: epochs " << model.meta.epochs_run << ", best epoch " << history.best_epoch << ", best_val_l3 "
      << Exact(model.meta.best_val_l3) << ", val_rmse " << Fixed(val_rmse, 2) << "\n";
  log << "train: model sha256 " << FileSha256(out) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
  std::vector<std::string> models;
  std::string corpus;
  std::string report;
  std::optional<std::string> table;
  std::optional<std::string> split;
  std::optional<std::string> render;
  std::optional<int> render_limit;
  std::optional<int> gutter;
  std::optional<std::string> config;
};

void AddEval(CLI::App& app, EvalFlags& f) {
  CLI::App* c = app.add_subcommand("eval", "Evaluate models on a corpus");
  c->add_option("--model", f.models, "Model file (repeatable)")->required()->envname("T2T_EVAL_MODEL");
  c->add_option("--corpus", f.corpus, "Corpus directory")->required()->envname("T2T_EVAL_CORPUS");
  c->add_option("--report", f.report, "JSON report path")->required()->envname("T2T_EVAL_REPORT");
  c->add_option("--table", f.table, "Text table path (default <report>.txt)")->envname("T2T_EVAL_TABLE");
  c->add_option("--split", f.split, "train | val | test | all")->envname("T2T_EVAL_SPLIT");
  c->add_option("--render", f.render, "Directory for comparison strips")->envname("T2T_EVAL_RENDER");
  c->add_option("--render-limit", f.render_limit, "Strips per model (default 16)")
      ->envname("T2T_EVAL_RENDER_LIMIT");
  c->add_option("--gutter", f.gutter, "Strip gutter in pixels (default 4)")->envname("T2T_EVAL_GUTTER");
  c->add_option("--config", f.config, "JSON eval config")->envname("T2T_EVAL_CONFIG");
}

std::string FormatTable(const EvalReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-6s %7s %10s %8s %8s %12s\n", "model", "split", "n", "rmse", "rmse_%",
                "ssim", "contact_iou");
  out += line;
  for (const EvalAggregate& a : report.Aggregate()) {
    std::snprintf(line, sizeof line, "%-16s %-6s %7zu %10.2f %8.2f %8.4f %12.4f\n", a.model_kind.c_str(),
                  a.split.c_str(), a.count, a.rmse, a.percent_fullscale, a.ssim, a.contact_iou);
    out += line;
  }
  return out;
}

int CmdEval(const EvalFlags& flags, std::ostream& log) {
  json j = LoadConfigFile(flags.config);
  Overlay(j, "split", flags.split);
  Overlay(j, "render_limit", flags.render_limit);
  Overlay(j, "gutter", flags.gutter);
  std::string split_name;
  int render_limit = 16, gutter = 4;
  try {
    split_name = j.value("split", std::string("all"));
    render_limit = j.value("render_limit", render_limit);
    gutter = j.value("gutter", gutter);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed eval config: ") + e.what());
  }
  if (render_limit < 0 || gutter < 0) throw InvalidArgument("render_limit and gutter must be >= 0");

  std::vector<TranslatorModel> models;
  std::vector<std::string> labels;
  std::set<std::string> used;
  for (const std::string& path : flags.models) {
    models.push_back(LoadModel(path));
    std::string label(ModelKindName(models.back().kind));
    if (!used.insert(label).second) label += ":" + fs::path(path).stem().string();
    used.insert(label);
    labels.push_back(label);
  }

  LoadOptions opt;
  opt.downsample = models.front().downsample;
  for (const TranslatorModel& m : models) {
    if (m.downsample != opt.downsample) opt.downsample = 1;
  }
  if (split_name != "all") opt.split = SplitFromName(split_name);
  const fs::path corpus(flags.corpus);
  const std::vector<PairedSample> samples = LoadCorpus(corpus, opt);
  if (samples.empty()) throw InvalidArgument("no samples in split " + split_name);

  EvalVisitor visit;
  if (flags.render) {
    visit = [&](const PairedSample& s, std::size_t m, const SampleImages& images) {
      if (static_cast<std::ptrdiff_t>(&s - samples.data()) >= render_limit) return;
      const std::vector<TactileImage> panels{Resample(s.x, models[m].output_grid), images.generated,
                                             images.phi_pred, images.truth};
      std::vector<PgmScale> scales;
      const auto bytes = EncodePgmStrip(panels, gutter, &scales);
      const fs::path path = fs::path(*flags.render) / labels[m] / (s.id + ".pgm");
      WriteBytes(path, bytes);
      log << "render: " << path.generic_string() << " x=" << FormatScale(scales[0])
          << " generated=" << FormatScale(scales[1]) << " phi_pred=" << FormatScale(scales[2])
          << " truth=" << FormatScale(scales[3]) << "\n";
    };
  }

  const EvalReport report = Evaluate(models, samples, labels, visit);
  SaveReport(report, flags.report);
  const std::string table = FormatTable(report);
  const fs::path table_path =
      flags.table ? fs::path(*flags.table) : fs::path(flags.report).replace_extension(".txt");
  WriteText(table_path, table);

  std::vector<fs::path> inputs{corpus / "manifest.json"};
  for (const std::string& p : flags.models) inputs.emplace_back(p);
  if (flags.config) inputs.emplace_back(*flags.config);
  json record_cfg = {{"split", split_name}, {"render_limit", render_limit}, {"gutter", gutter},
                     {"labels", labels}, {"downsample", opt.downsample}};
  WriteRunRecord(flags.report + ".run.json", "eval", record_cfg, inputs);
  log << table;
  return kExitOk;
}

// ---------------------------------------------------------------- interp / render

struct InterpFlags {
  std::string to;
  std::string in;
  std::string out;
  std::optional<std::string> layout;
};

void AddInterp(CLI::App& app, InterpFlags& f) {
  CLI::App* c = app.add_subcommand("interp", "Convert between taxel arrays (.txl) and tactile images (.pfm)");
  c->add_option("--to", f.to, "image | array")
      ->required()
      ->check(CLI::IsMember({"image", "array"}))
      ->envname("T2T_INTERP_TO");
  c->add_option("--in", f.in, "Input file")->required()->envname("T2T_INTERP_IN");
  c->add_option("--out", f.out, "Output file")->required()->envname("T2T_INTERP_OUT");
  c->add_option("--layout", f.layout, "Taxel layout JSON (default layout otherwise)")->envname("T2T_LAYOUT");
}

int CmdInterp(const InterpFlags& f, std::ostream& log) {
  const TaxelLayout layout = LayoutOrDefault(f.layout);
  const PixelGrid grid = FitTactileGrid(layout);
  if (f.to == "image") {
    ArraySample y = DecodeTxl(ReadBytes(f.in));
    if (y.size() != layout.n_taxels()) {
      throw ShapeMismatch("array has " + std::to_string(y.size()) + " values, layout has " +
                          std::to_string(layout.n_taxels()) + " taxels");
    }
    y.layout_id = layout.id();
    WritePfm(f.out, Phi(y, layout, grid));
  } else {
    const ArraySample y = PhiInv(ReadPfm(f.in, grid), layout);
    WriteBytes(f.out, EncodeTxl(y));
  }
  log << "interp: " << f.in << " -> " << f.out << "\n";
  return kExitOk;
}

struct RenderFlags {
  std::vector<std::string> in;
  std::string out;
  int gutter = 4;
  std::optional<std::string> layout;
};

void AddRender(CLI::App& app, RenderFlags& f) {
  CLI::App* c = app.add_subcommand("render", "Write a PGM preview of one or more .txl / .pfm files");
  c->add_option("--in", f.in, "Input files; several make a strip")->required()->envname("T2T_RENDER_IN");
  c->add_option("--out", f.out, "PGM output")->required()->envname("T2T_RENDER_OUT");
  c->add_option("--gutter", f.gutter, "Strip gutter in pixels")->envname("T2T_RENDER_GUTTER");
  c->add_option("--layout", f.layout, "Taxel layout JSON for .txl inputs")->envname("T2T_LAYOUT");
}

int CmdRender(const RenderFlags& f, std::ostream& log) {
  std::optional<TaxelLayout> layout;
  std::vector<TactileImage> panels;
  for (const std::string& path : f.in) {
    const std::string ext = fs::path(path).extension().string();
    if (ext == ".txl") {
      if (!layout) layout = LayoutOrDefault(f.layout);
      ArraySample y = DecodeTxl(ReadBytes(path));
      if (y.size() != layout->n_taxels()) throw ShapeMismatch("array size does not match the layout in " + path);
      y.layout_id = layout->id();
      panels.push_back(Phi(y, *layout, FitTactileGrid(*layout)));
    } else if (ext == ".pfm") {
      panels.push_back(ReadPfm(path));
    } else {
      throw InvalidArgument("unsupported input " + path + " (expected .txl or .pfm)");
    }
  }
  std::vector<PgmScale> scales(1);
  const auto bytes = panels.size() == 1 ? EncodePgm(panels.front(), scales.data())
                                        : EncodePgmStrip(panels, f.gutter, &scales);
  WriteBytes(f.out, bytes);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    log << "render: " << f.in[i] << " scale " << FormatScale(scales[i]) << "\n";
  }
  return kExitOk;
}

}  // namespace

int ExitCodeFor(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return kExitConfig;
    case ErrorCategory::kIo:
      return kExitIo;
    case ErrorCategory::kNumeric:
      return kExitNumeric;
    case ErrorCategory::kShape:
      return kExitShape;
  }
  return kExitUnexpected;
}

int Run(const std::vector<std::string>& args, std::ostream& log) {
  CLI::App app{"Touch-to-touch translation toolkit", "t2t"};
  app.require_subcommand(1, 1);
  GenFlags gen;
  TrainFlags train;
  EvalFlags eval;
  InterpFlags interp;
  RenderFlags render;
  AddGen(app, gen);
  AddTrain(app, train);
  AddEval(app, eval);
  AddInterp(app, interp);
  AddRender(app, render);

  std::vector<const char*> argv{"t2t"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, log, log);
    return ReportError(log, kExitConfig, "config", e.what());
  }

  try {
    if (app.got_subcommand("gen")) return CmdGen(gen, log);
    if (app.got_subcommand("train")) return CmdTrain(train, log);
    if (app.got_subcommand("eval")) return CmdEval(eval, log);
    if (app.got_subcommand("interp")) return CmdInterp(interp, log);
    return CmdRender(render, log);
  } catch (const Error& e) {
    const int code = ExitCodeFor(e.category());
    return ReportError(log, code, CategoryName(e.category()), e.what());
  } catch (const std::exception& e) {
    return ReportError(log, kExitUnexpected, "unexpected", e.what());
  }
}

}  // namespace t2t::cli
