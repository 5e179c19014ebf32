/* Copyright 2026 The AEGM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "aegm/cli/commands.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include "aegm/audio/feature_cache.hpp"
#include "aegm/audio/wav.hpp"
#include "aegm/common/error.hpp"
#include "aegm/common/hash.hpp"
#include "aegm/core/checkpoint.hpp"
#include "aegm/data/synth.hpp"
#include "aegm/scoring/scoring.hpp"
#include "aegm/train/trainer.hpp"

namespace aegm::cli {
namespace fs = std::filesystem;
namespace {

constexpr const char* kResolvedName = "run_config.resolved";

std::string Quote(const fs::path& p) { return p.string(); }

// Sorted *.feat files of one split, MissingArtifact naming the remedy.
std::vector<fs::path> ListFeatures(const fs::path& root, const std::string& machine,
                                   data::Split split) {
  const fs::path dir = root / machine / data::SplitName(split);
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".feat") files.push_back(e.path());
  if (files.empty())
    throw Error(ErrorCode::kMissingArtifact,
                "no " + data::SplitName(split) + " features under " + Quote(dir) +
                    "; run `aegm features --data <dataset dir> --out " + Quote(root) +
                    " --machine " + machine + "`");
  std::sort(files.begin(), files.end());
  return files;
}

audio::FeatureMatrix ReadChecked(const fs::path& path, std::uint64_t expected,
                                 const std::string& remedy,
                                 audio::FeatureFileHeader* header = nullptr) {
  try {
    return audio::ReadFeatureFile(path, expected, header);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConfigHashMismatch) throw;
    throw Error(ErrorCode::kConfigHashMismatch,
                path.string() + " was extracted with feature config " +
                    HashToHex(audio::ReadFeatureHeader(path).config_hash) + ", expected " +
                    HashToHex(expected) + "; " + remedy);
  }
}

std::string FeatureRemedy(const fs::path& features_dir, const std::string& machine) {
  return "regenerate with `aegm features --data <dataset dir> --out " + Quote(features_dir) +
         " --machine " + machine + "` using the same feature settings";
}

std::string FormatG(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

DirLock::DirLock(const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path lock = dir / ".aegm.lock";
  fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::kIoError, "cannot open " + lock.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::kLocked, "another aegm process is using " + dir.string());
  }
}

DirLock::~DirLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

fs::path FeaturePath(const fs::path& root, const std::string& machine, data::Split split,
                     const std::string& clip_id) {
  return root / machine / data::SplitName(split) / (clip_id + ".feat");
}

void RunSynth(const RunConfig& cfg, const fs::path& out_dir) {
  for (const auto& machine : cfg.GetList("machine")) data::SynthGenerate(cfg.SynthSpecFor(machine), out_dir);
}

FeatureStats RunFeatures(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir,
                         std::ostream& log) {
  FeatureStats total;
  data::ScanOptions scan;
  scan.allow_unlabeled_test = cfg.GetBool("allow_unlabeled_test");
  for (const auto& machine : cfg.GetList("machine")) {
    const audio::FeatureConfig fc = cfg.FeatureConfigFor(machine);
    const std::uint64_t hash = fc.Hash();
    FeatureStats stats;
    for (const auto& clip : data::ScanDcase(data_dir, machine, scan)) {
      const fs::path target = FeaturePath(out_dir, machine, clip.split, clip.clip_id());
      bool fresh = false;
      if (fs::exists(target) && fs::last_write_time(target) >= fs::last_write_time(clip.path)) {
        try {
          fresh = audio::ReadFeatureHeader(target).config_hash == hash;
        } catch (const Error&) {
          fresh = false;  // unreadable cache entry: rebuild it
        }
      }
      if (fresh) {
        ++stats.skipped;
        continue;
      }
      audio::FeatureMatrix m = audio::ExtractFeatures(audio::LoadWav(clip.path), fc, clip.section_number);
      m.clip_id = clip.clip_id();
      audio::WriteFeatureFile(target, m, fc);
      ++stats.written;
    }
    log << machine << ": " << stats.written << " written, " << stats.skipped << " up to date ("
        << audio::FeatureKindName(fc.kind) << ", config " << HashToHex(hash) << ")\n";
    total.written += stats.written;
    total.skipped += stats.skipped;
  }
  return total;
}

fs::path RunTrain(const RunConfig& cfg, const fs::path& features_dir, const fs::path& out_dir,
                  std::ostream& log) {
  const auto machines = cfg.GetList("machine");
  if (machines.size() != 1)
    throw Error(ErrorCode::kBadConfig, "train takes exactly one machine, got '" + cfg.Get("machine") + "'");
  const std::string& machine = machines.front();
  const audio::FeatureConfig fc = cfg.FeatureConfigFor(machine);
  const std::uint64_t hash = fc.Hash();
  const std::string remedy = FeatureRemedy(features_dir, machine);

  std::vector<audio::FeatureMatrix> clips;
  std::set<int> numbers;
  for (const auto& path : ListFeatures(features_dir, machine, data::Split::kTrain)) {
    clips.push_back(ReadChecked(path, hash, remedy));
    numbers.insert(clips.back().section_id);
  }

  const bool grouped = cfg.GetBool("group_decoders");
  CheckpointMeta meta;
  meta.machine = machine;
  std::map<int, int> decoder_of;
  for (int n : numbers) {
    const int d = grouped ? static_cast<int>(decoder_of.size()) : 0;
    decoder_of[n] = d;
    meta.section_to_decoder.emplace_back(n, d);
  }
  for (auto& c : clips) c.section_id = decoder_of.at(c.section_id);
  const int num_decoders = grouped ? static_cast<int>(numbers.size()) : 1;

  const AegmConfig model_cfg = cfg.ModelConfig(fc.InputDim(), num_decoders);
  train::TrainConfig tcfg = cfg.TrainConfigFor(machine, fc);
  tcfg.checkpoint_dir = out_dir;
  meta.feature_config_hash = hash;
  meta.feature_config = fc.Canonical();
  meta.seed = tcfg.seed;
  tcfg.checkpoint_meta = meta;
  tcfg.Validate(num_decoders);

  const train::TrainingSet set = train::TrainingSet::FromFeatures(clips, num_decoders);
  cfg.WriteResolved(out_dir / kResolvedName, {{"features", features_dir}, {"out", out_dir}});
  const fs::path log_path = out_dir / "train_log.csv";
  train::WriteTrainLogHeader(log_path, num_decoders);
  log << machine << ": training on " << set.rows.rows() << " rows x " << set.rows.cols()
      << " dims, " << num_decoders << " decoder(s), " << tcfg.epochs << " epochs\n";
  const int report_every = std::max(1, tcfg.epochs / 10);
  train::Train(set, model_cfg, tcfg, [&](const train::TrainLogEntry& e) {
    train::AppendTrainLog(log_path, e);
    if (e.epoch % report_every == 0 || e.epoch == tcfg.epochs)
      log << "epoch " << e.epoch << "/" << tcfg.epochs << " l_total=" << FormatG(e.mean.l_total, "%.5g")
          << " l_rec=" << FormatG(e.mean.l_rec, "%.5g") << " l_aux=" << FormatG(e.mean.l_aux, "%.5g")
          << "\n";
  });
  return train::CheckpointPath(out_dir, tcfg.epochs);
}

fs::path ResolveCheckpoint(const fs::path& checkpoint) {
  if (fs::is_regular_file(checkpoint)) return checkpoint;
  if (fs::is_directory(checkpoint)) {
    static const std::regex kName(R"(ckpt_epoch_(\d+)\.aegm)");
    fs::path best;
    long best_epoch = -1;
    for (const auto& e : fs::directory_iterator(checkpoint)) {
      std::smatch m;
      const std::string name = e.path().filename().string();
      if (std::regex_match(name, m, kName) && std::stol(m[1]) > best_epoch) {
        best_epoch = std::stol(m[1]);
        best = e.path();
      }
    }
    if (best_epoch >= 0) return best;
  }
  throw Error(ErrorCode::kMissingArtifact,
              "no checkpoint at " + Quote(checkpoint) +
                  "; run `aegm train --features <features dir> --out " + Quote(checkpoint) + "`");
}

std::vector<fs::path> RunScore(const RunConfig& cfg, const fs::path& features_dir,
                               const fs::path& checkpoint, const fs::path& out_dir,
                               const std::vector<scoring::ScoreMode>& modes, std::ostream& log) {
  const fs::path ckpt = ResolveCheckpoint(checkpoint);
  CheckpointMeta meta;
  const AegmModel model = LoadCheckpoint(ckpt, &meta);
  const bool has_ac = model.config().use_classifier;
  const bool want_ens = std::count(modes.begin(), modes.end(), scoring::ScoreMode::kEns) > 0;
  for (auto m : modes)
    if (m != scoring::ScoreMode::kGae && !has_ac)
      throw Error(ErrorCode::kBadConfig, "score mode '" + scoring::ScoreModeName(m) +
                                             "' needs a classifier; " + Quote(ckpt) + " has none");

  const std::string remedy = FeatureRemedy(features_dir, meta.machine);
  const auto aggregation = cfg.Aggregation();
  std::vector<scoring::ScoreRecord> records;
  for (const auto& path : ListFeatures(features_dir, meta.machine, data::Split::kTest)) {
    const audio::FeatureMatrix fm = ReadChecked(path, meta.feature_config_hash, remedy);
    scoring::ScoreRecord r;
    r.clip_id = fm.clip_id;
    r.section_id = fm.section_id;
    const scoring::ClipScores s = scoring::ScoreClip(model, fm, meta.DecoderFor(fm.section_id), aggregation);
    r.a_rec = s.a_rec;
    r.a_aux = s.a_aux;
    records.push_back(std::move(r));
  }
  if (want_ens) scoring::Ensemble(records, cfg.Grouping());

  std::map<int, std::vector<const scoring::ScoreRecord*>> by_section;
  for (const auto& r : records) by_section[r.section_id].push_back(&r);

  cfg.WriteResolved(out_dir / kResolvedName,
                    {{"features", features_dir}, {"checkpoint", ckpt}, {"out", out_dir}});
  std::vector<fs::path> written;
  for (const auto& [section, recs] : by_section) {
    for (auto mode : modes) {
      std::vector<scoring::ScoreLine> lines;
      for (const auto* r : recs) {
        double v = r->a_rec;
        if (mode == scoring::ScoreMode::kAc) v = r->a_aux;
        if (mode == scoring::ScoreMode::kEns) v = *r->a_ens;
        lines.push_back({r->clip_id + ".wav", v});
      }
      const fs::path p = out_dir / scoring::ScoreFileName(meta.machine, section, mode);
      scoring::WriteScoreCsv(p, lines);
      written.push_back(p);
    }
  }
  log << meta.machine << ": " << records.size() << " clips scored, " << written.size()
      << " files from " << ckpt.filename().string() << "\n";
  return written;
}

eval::EvalReport RunEval(const RunConfig& cfg, const fs::path& scores_dir, const fs::path& data_dir,
                         const fs::path& out_dir) {
  static const std::regex kName(R"(anomaly_score_(.+)_section_(\d+)_(gae|ac|ens)\.csv)");
  struct Found {
    std::string machine;
    int section;
    scoring::ScoreMode mode;
    fs::path path;
  };
  std::vector<Found> found;
  if (fs::is_directory(scores_dir))
    for (const auto& e : fs::directory_iterator(scores_dir)) {
      std::smatch m;
      const std::string name = e.path().filename().string();
      if (std::regex_match(name, m, kName))
        found.push_back({m[1], std::stoi(m[2]), scoring::ParseScoreMode(m[3]), e.path()});
    }
  if (found.empty())
    throw Error(ErrorCode::kMissingArtifact,
                "no score files in " + Quote(scores_dir) +
                    "; run `aegm score --features <features dir> --checkpoint <run dir> --out " +
                    Quote(scores_dir) + "`");
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    if (a.machine != b.machine) return a.machine < b.machine;
    if (a.mode != b.mode) return a.mode < b.mode;
    return a.section < b.section;
  });

  // file name -> label, per machine
  std::map<std::string, std::map<std::string, scoring::Label>> labels;
  const fs::path manifest = data_dir / "manifest.csv";
  std::set<std::string> machines;
  for (const auto& f : found) machines.insert(f.machine);
  if (fs::exists(manifest)) {
    for (const auto& row : data::ReadManifest(manifest))
      if (row.split == data::Split::kTest)
        labels[row.machine][fs::path(row.path).filename().string()] = row.label;
  } else {
    data::ScanOptions scan;
    scan.allow_unlabeled_test = cfg.GetBool("allow_unlabeled_test");
    for (const auto& machine : machines)
      for (const auto& clip : data::ScanDcase(data_dir, machine, scan))
        if (clip.split == data::Split::kTest) labels[machine][clip.path.filename().string()] = clip.label;
  }

  std::vector<eval::ScoreGroup> groups;
  std::vector<std::string> unknown;
  for (const auto& f : found) {
    eval::ScoreGroup g{f.machine, f.section, scoring::ScoreModeName(f.mode), {}};
    const auto& table = labels[f.machine];
    for (const auto& line : scoring::ReadScoreCsv(f.path)) {
      auto it = table.find(line.file_name);
      if (it == table.end() || it->second == scoring::Label::kUnknown) {
        unknown.push_back(f.path.filename().string() + ": " + line.file_name);
        continue;
      }
      g.scores.push_back({line.score, it->second == scoring::Label::kAnomaly});
    }
    groups.push_back(std::move(g));
  }
  if (!unknown.empty()) {
    std::string msg = std::to_string(unknown.size()) + " scored clip(s) without a ground-truth label:";
    for (std::size_t i = 0; i < unknown.size() && i < 20; ++i) msg += "\n  " + unknown[i];
    if (unknown.size() > 20) msg += "\n  ...";
    throw Error(ErrorCode::kUnknownClip, msg);
  }

  eval::EvalReport report = eval::BuildReport(groups, cfg.GetDouble("pauc_p"));
  cfg.WriteResolved(out_dir / kResolvedName,
                    {{"scores", scores_dir}, {"data", data_dir}, {"out", out_dir}});
  report.WriteCsv(out_dir / "report.csv");
  std::ofstream txt(out_dir / "report.txt", std::ios::binary | std::ios::trunc);
  txt << report.ToText();
  if (!txt) throw Error(ErrorCode::kIoError, "cannot write " + (out_dir / "report.txt").string());
  return report;
}

void RunExportEmbeddings(const RunConfig& cfg, const fs::path& checkpoint, const fs::path& features_dir,
                         data::Split split, const fs::path& out_csv) {
  const fs::path ckpt = ResolveCheckpoint(checkpoint);
  CheckpointMeta meta;
  const AegmModel model = LoadCheckpoint(ckpt, &meta);
  const bool has_ac = model.config().use_classifier;
  const int k = model.config().bottleneck_dim;
  const int m = model.config().num_sections;

  if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
  const fs::path tmp = out_csv.string() + ".tmp";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  out << "clip_id,section,label";
  for (int i = 0; i < k; ++i) out << ",e_" << i;
  if (has_ac)
    for (int j = 0; j < m; ++j) out << ",z_" << j;
  out << "\n";

  const std::string remedy = FeatureRemedy(features_dir, meta.machine);
  for (const auto& path : ListFeatures(features_dir, meta.machine, split)) {
    const audio::FeatureMatrix fm = ReadChecked(path, meta.feature_config_hash, remedy);
    std::string label = scoring::LabelName(scoring::Label::kUnknown);
    try {
      if (auto l = data::ParseClipName(fm.clip_id + ".wav").label) label = scoring::LabelName(*l);
    } catch (const Error&) {
    }
    const Tensor2 e = model.Encode(fm.rows);
    Tensor2 z;
    if (has_ac) z = model.ClassifierLogits(e);
    const std::string prefix = fm.clip_id + "," + eval::SectionLabel(fm.section_id) + "," + label;
    for (Eigen::Index r = 0; r < e.rows(); ++r) {
      out << prefix;
      for (int i = 0; i < k; ++i) out << ',' << FormatG(e(r, i), "%.9g");
      if (has_ac)
        for (int j = 0; j < m; ++j) out << ',' << FormatG(z(r, j), "%.9g");
      out << '\n';
    }
  }
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
  fs::rename(tmp, out_csv);
  cfg.WriteResolved(out_csv.string() + "." + kResolvedName,
                    {{"checkpoint", ckpt}, {"features", features_dir}, {"out", out_csv}});
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group-decoder autoencoder with an auxiliary section classifier for anomalous sound detection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  app.add_option("--config", config_file, "flat key=value settings file")->check(CLI::ExistingFile);
  std::map<std::string, std::string> storage;
  std::vector<std::pair<std::string, CLI::Option*>> key_opts;
  for (const auto& k : KnownKeys()) {
    CLI::Option* o = app.add_option(FlagName(k.key), storage[k.key], k.help)->group("Settings");
    o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);  // later flags win
    if (k.default_value == "true" || k.default_value == "false") o->expected(0, 1);
    key_opts.emplace_back(k.key, o);
  }

  std::string out_dir, data_dir, features_dir, checkpoint, scores_dir, mode = "all", split = "test";
  auto* synth = app.add_subcommand("synth", "generate the synthetic multi-section corpus");
  synth->add_option("--out", out_dir, "dataset root")->required();

  auto* features = app.add_subcommand("features", "extract and cache frame features");
  features->add_option("--data", data_dir, "dataset root")->required();
  features->add_option("--out", out_dir, "feature cache root")->required();

  auto* train = app.add_subcommand("train", "train one machine's model");
  train->add_option("--features", features_dir, "feature cache root")->required();
  train->add_option("--out", out_dir, "run directory for checkpoints and logs")->required();

  auto* score = app.add_subcommand("score", "write anomaly score CSVs");
  score->add_option("--features", features_dir, "feature cache root")->required();
  score->add_option("--checkpoint", checkpoint, "checkpoint file or run directory")->required();
  score->add_option("--out", out_dir, "score directory")->required();
  score->add_option("--mode", mode, "gae, ac, ens, comma list, or all")->capture_default_str();

  auto* evaluate = app.add_subcommand("eval", "AUC / pAUC report from score CSVs");
  evaluate->add_option("--scores", scores_dir, "score directory")->required();
  evaluate->add_option("--data", data_dir, "dataset root holding labels")->required();
  evaluate->add_option("--out", out_dir, "report directory (default: the score directory)");

  auto* exporter = app.add_subcommand("export-embeddings", "bottleneck embeddings and logits per row");
  exporter->add_option("--checkpoint", checkpoint, "checkpoint file or run directory")->required();
  exporter->add_option("--features", features_dir, "feature cache root")->required();
  exporter->add_option("--out", out_dir, "output CSV file")->required();
  exporter->add_option("--split", split, "train or test")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  std::map<std::string, std::string> flags;
  for (const auto& [key, o] : key_opts) {
    if (o->count() == 0) continue;
    const std::string& v = storage[key];
    flags[key] = v.empty() && o->get_expected_min() == 0 ? "true" : v;
  }

  RunConfig cfg;
  std::vector<scoring::ScoreMode> modes;
  data::Split export_split = data::Split::kTest;
  try {
    cfg = ResolveRunConfig(flags, config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file),
                           ProcessEnv());
    if (score->parsed()) {
      if (mode == "all") {
        modes = {scoring::ScoreMode::kGae, scoring::ScoreMode::kAc, scoring::ScoreMode::kEns};
      } else {
        std::stringstream ss(mode);
        std::string tok;
        while (std::getline(ss, tok, ',')) modes.push_back(scoring::ParseScoreMode(tok));
        if (modes.empty()) throw Error(ErrorCode::kBadConfig, "--mode is empty");
      }
    }
    if (exporter->parsed()) export_split = data::ParseSplit(split);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) {
      DirLock lock(out_dir);
      RunSynth(cfg, out_dir);
      cfg.WriteResolved(fs::path(out_dir) / kResolvedName, {{"out", out_dir}});
      out << "synthetic corpus written to " << out_dir << "\n";
    } else if (features->parsed()) {
      DirLock lock(out_dir);
      RunFeatures(cfg, data_dir, out_dir, out);
      cfg.WriteResolved(fs::path(out_dir) / kResolvedName, {{"data", data_dir}, {"out", out_dir}});
    } else if (train->parsed()) {
      DirLock lock(out_dir);
      const fs::path ckpt = RunTrain(cfg, features_dir, out_dir, out);
      out << "checkpoint " << ckpt.string() << "\n";
    } else if (score->parsed()) {
      DirLock lock(out_dir);
      // Only the classifier-free model limits "all" to the reconstruction score.
      const fs::path ckpt = ResolveCheckpoint(checkpoint);
      if (mode == "all") {
        CheckpointMeta meta;
        if (!LoadCheckpoint(ckpt, &meta).config().use_classifier) modes = {scoring::ScoreMode::kGae};
      }
      RunScore(cfg, features_dir, ckpt, out_dir, modes, out);
    } else if (evaluate->parsed()) {
      const fs::path dest = out_dir.empty() ? fs::path(scores_dir) : fs::path(out_dir);
      DirLock lock(dest);
      out << RunEval(cfg, scores_dir, data_dir, dest).ToText();
    } else if (exporter->parsed()) {
      const fs::path csv(out_dir);
      DirLock lock(csv.has_parent_path() ? csv.parent_path() : fs::path("."));
      RunExportEmbeddings(cfg, checkpoint, features_dir, export_split, csv);
      out << "embeddings written to " << csv.string() << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace aegm::cli
