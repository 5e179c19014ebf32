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

#include "aegm/cli/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "aegm/common/error.hpp"

namespace aegm::cli {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value,
                           const std::string& want) {
  throw Error(ErrorCode::kBadConfig, key + "=\"" + value + "\" is not " + want);
}

bool Contains(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

}  // namespace

const std::vector<KeyInfo>& KnownKeys() {
  static const std::vector<KeyInfo> keys = {
      {"seed", "0", "base seed for synthesis, init, batching and augmentation"},
      {"machine", "synth", "machine type(s); comma-separated where a command allows several"},
      // synthetic corpus
      {"synth_sections", "3", "sections per synthetic machine"},
      {"synth_train_clips", "60", "normal training clips per section"},
      {"synth_test_normal", "20", "normal test clips per section"},
      {"synth_test_anomaly", "20", "anomalous test clips per section"},
      {"synth_seconds", "2.0", "clip length in seconds"},
      {"synth_snr_db", "20", "tone-to-noise ratio"},
      {"synth_base_freqs", "", "comma-separated fundamentals; empty picks a ladder from 300 Hz"},
      {"anomaly_kind", "harmonic_distortion",
       "harmonic_distortion | transient_bursts | section_swap"},
      // features
      {"feature", "", "logmel | stft; empty chooses by stft_machines"},
      {"stft_machines", "pump,slider", "machines that default to STFT magnitudes"},
      {"n_fft", "1024", "frame length in samples"},
      {"hop", "512", "hop in samples"},
      {"n_mels", "128", "mel bands"},
      {"context_frames", "5", "frames stacked per input row"},
      {"fmin", "0", "lowest mel edge in Hz"},
      {"fmax", "8000", "highest mel edge in Hz"},
      {"log_floor_epsilon", "1e-12", "added to mel power before the log"},
      // model
      {"encoder_layers", "128,128,128,128", "hidden widths of the shared encoder"},
      {"bottleneck_dim", "8", "embedding width"},
      {"batch_norm", "true", "batch normalization on hidden layers"},
      {"classifier", "true", "auxiliary section classifier"},
      {"group_decoders", "true", "one decoder per section; false shares a single decoder"},
      // training
      {"epochs", "600", "training epochs"},
      {"batch_size", "32", "rows per batch"},
      {"lr_gae", "0.001", "Adam step for encoder and decoders"},
      {"lr_ac", "0.00001", "Adam step for the classifier"},
      {"differentiable_weights", "false", "backpropagate through the adaptive weights"},
      {"checkpoint_every", "0", "extra checkpoint period in epochs; 0 keeps only the last"},
      {"augment_machines", "fan,gearbox", "machines trained with low-frequency shuffling"},
      {"augment_bins", "32", "lowest bins shuffled across context slots"},
      {"augment_prob", "0.5", "fraction of rows shuffled"},
      // scoring and evaluation
      {"ensemble_grouping", "section", "section | global"},
      {"prob_aggregation", "mean_prob", "mean_prob | mean_score"},
      {"pauc_p", "0.1", "false-positive-rate limit of pAUC"},
      {"allow_unlabeled_test", "false", "accept test clips without a label token"},
  };
  return keys;
}

std::string FlagName(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

std::string EnvName(const std::string& key) {
  std::string e = "AEGM_" + key;
  for (char& c : e) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return e;
}

EnvLookup ProcessEnv() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

RunConfig::RunConfig() {
  for (const auto& k : KnownKeys()) values_[k.key] = {k.default_value, "default"};
}

void RunConfig::Set(const std::string& key, const std::string& value, const std::string& source) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kBadConfig, "unknown setting '" + key + "'");
  it->second = {Trim(value), source};
}

void RunConfig::ApplyFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kBadConfig,
                  path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    Set(Trim(line.substr(0, eq)), line.substr(eq + 1), "file");
  }
}

void RunConfig::ApplyEnv(const EnvLookup& env) {
  for (const auto& k : KnownKeys())
    if (auto v = env(EnvName(k.key))) Set(k.key, *v, "env");
}

const std::string& RunConfig::Get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kBadConfig, "unknown setting '" + key + "'");
  return it->second.value;
}

int RunConfig::GetInt(const std::string& key) const {
  const std::string& v = Get(key);
  errno = 0;
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno != 0 || x < -2147483647L || x > 2147483647L)
    BadValue(key, v, "an integer");
  return static_cast<int>(x);
}

double RunConfig::GetDouble(const std::string& key) const {
  const std::string& v = Get(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') BadValue(key, v, "a number");
  return x;
}

bool RunConfig::GetBool(const std::string& key) const {
  std::string v = Get(key);
  for (char& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  BadValue(key, Get(key), "a boolean");
}

std::uint64_t RunConfig::GetU64(const std::string& key) const {
  const std::string& v = Get(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || *end != '\0' || errno != 0)
    BadValue(key, v, "a non-negative integer");
  return static_cast<std::uint64_t>(x);
}

std::vector<std::string> RunConfig::GetList(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(Get(key));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = Trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

audio::FeatureConfig RunConfig::FeatureConfigFor(const std::string& machine) const {
  audio::FeatureConfig f;
  const std::string& kind = Get("feature");
  if (!kind.empty())
    f.kind = audio::ParseFeatureKind(kind);
  else
    f.kind = Contains(GetList("stft_machines"), machine) ? audio::FeatureKind::kStftMag
                                                         : audio::FeatureKind::kLogMel;
  f.n_fft = GetInt("n_fft");
  f.hop = GetInt("hop");
  f.n_mels = GetInt("n_mels");
  f.context_frames = GetInt("context_frames");
  f.fmin = GetDouble("fmin");
  f.fmax = GetDouble("fmax");
  f.log_floor_epsilon = GetDouble("log_floor_epsilon");
  f.Validate();
  return f;
}

std::optional<train::AugmentConfig> RunConfig::AugmentFor(
    const std::string& machine, const audio::FeatureConfig& features) const {
  if (!Contains(GetList("augment_machines"), machine)) return std::nullopt;
  train::AugmentConfig a;
  a.shuffle.low_bins = GetInt("augment_bins");
  a.shuffle.probability = GetDouble("augment_prob");
  a.per_frame_dim = features.PerFrameDim();
  a.context_frames = features.context_frames;
  if (a.shuffle.low_bins < 0 || a.shuffle.low_bins > a.per_frame_dim)
    throw Error(ErrorCode::kBadConfig, "augment_bins must lie in [0, per-frame dim]");
  if (!(a.shuffle.probability >= 0.0 && a.shuffle.probability <= 1.0))
    throw Error(ErrorCode::kBadConfig, "augment_prob must lie in [0, 1]");
  return a;
}

AegmConfig RunConfig::ModelConfig(int input_dim, int num_decoders) const {
  AegmConfig m;
  m.input_dim = input_dim;
  m.encoder_layers.clear();
  for (const auto& w : GetList("encoder_layers")) {
    char* end = nullptr;
    const long x = std::strtol(w.c_str(), &end, 10);
    if (*end != '\0') BadValue("encoder_layers", Get("encoder_layers"), "a list of widths");
    m.encoder_layers.push_back(static_cast<int>(x));
  }
  m.bottleneck_dim = GetInt("bottleneck_dim");
  m.num_sections = num_decoders;
  m.use_batch_norm = GetBool("batch_norm");
  m.use_classifier = GetBool("classifier");
  m.Validate();
  return m;
}

train::TrainConfig RunConfig::TrainConfigFor(const std::string& machine,
                                             const audio::FeatureConfig& features) const {
  train::TrainConfig t;
  t.epochs = GetInt("epochs");
  t.batch_size = GetInt("batch_size");
  t.lr_gae = GetDouble("lr_gae");
  t.lr_ac = GetDouble("lr_ac");
  t.seed = GetU64("seed");
  t.augment = AugmentFor(machine, features);
  t.differentiable_weights = GetBool("differentiable_weights");
  t.checkpoint_every = GetInt("checkpoint_every");
  return t;
}

data::SynthSpec RunConfig::SynthSpecFor(const std::string& machine) const {
  data::SynthSpec s;
  s.machine = machine;
  s.num_sections = GetInt("synth_sections");
  s.clips_per_section_train = GetInt("synth_train_clips");
  s.test_normal_per_section = GetInt("synth_test_normal");
  s.test_anomaly_per_section = GetInt("synth_test_anomaly");
  s.clip_seconds = GetDouble("synth_seconds");
  s.noise_snr_db = GetDouble("synth_snr_db");
  for (const auto& f : GetList("synth_base_freqs")) {
    char* end = nullptr;
    const double x = std::strtod(f.c_str(), &end);
    if (*end != '\0') BadValue("synth_base_freqs", Get("synth_base_freqs"), "a list of numbers");
    s.base_freqs.push_back(x);
  }
  s.anomaly_kind = data::ParseAnomalyKind(Get("anomaly_kind"));
  s.seed = GetU64("seed");
  s.Validate();
  return s;
}

scoring::EnsembleGrouping RunConfig::Grouping() const {
  const std::string& g = Get("ensemble_grouping");
  if (g == "section") return scoring::EnsembleGrouping::kPerSection;
  if (g == "global") return scoring::EnsembleGrouping::kGlobal;
  BadValue("ensemble_grouping", g, "section or global");
}

scoring::ProbAggregation RunConfig::Aggregation() const {
  const std::string& a = Get("prob_aggregation");
  if (a == "mean_prob") return scoring::ProbAggregation::kMeanProbability;
  if (a == "mean_score") return scoring::ProbAggregation::kMeanScore;
  BadValue("prob_aggregation", a, "mean_prob or mean_score");
}

void RunConfig::Validate() const {
  const std::vector<std::string> machines = GetList("machine");
  if (machines.empty()) throw Error(ErrorCode::kBadConfig, "machine must name at least one machine");
  for (const auto& m : machines) {
    const audio::FeatureConfig f = FeatureConfigFor(m);
    const train::TrainConfig t = TrainConfigFor(m, f);
    const bool grouped = GetBool("group_decoders");
    const AegmConfig mc = ModelConfig(f.InputDim(), grouped ? 2 : 1);
    t.Validate(mc.num_sections);
    if (!grouped && mc.use_classifier)
      throw Error(ErrorCode::kBadConfig,
                  "a shared decoder leaves a single class; set classifier=false with "
                  "group_decoders=false");
    SynthSpecFor(m);
  }
  Grouping();
  Aggregation();
  const double p = GetDouble("pauc_p");
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::kBadConfig, "pauc_p must lie in (0, 1]");
  GetBool("allow_unlabeled_test");
}

std::string RunConfig::Render(const PathList& paths) const {
  std::string out;
  for (const auto& [key, entry] : values_)
    out += key + "=" + entry.value + "  # " + entry.source + "\n";
  for (const auto& [name, path] : paths) out += "path." + name + "=" + path.string() + "\n";
  return out;
}

void RunConfig::WriteResolved(const std::filesystem::path& path, const PathList& paths) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << Render(paths);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

RunConfig ResolveRunConfig(const std::map<std::string, std::string>& flags,
                           const std::optional<std::filesystem::path>& config_file,
                           const EnvLookup& env) {
  RunConfig cfg;
  if (config_file) cfg.ApplyFile(*config_file);
  if (env) cfg.ApplyEnv(env);
  for (const auto& [key, value] : flags) cfg.Set(key, value, "flag");
  cfg.Validate();
  return cfg;
}

}  // namespace aegm::cli
