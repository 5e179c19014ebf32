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

#include "aegm/core/checkpoint.hpp"

#include <sstream>

#include "aegm/common/container.hpp"
#include "aegm/common/error.hpp"
#include "aegm/common/hash.hpp"

namespace aegm {
namespace {

// Params is AegmParams or const AegmParams.
template <typename Params, typename Fn>
void ForEachLayer(Params& p, bool with_classifier, Fn&& fn) {
  for (std::size_t i = 0; i < p.encoder.layers.size(); ++i) fn("enc" + std::to_string(i), p.encoder.layers[i]);
  for (std::size_t d = 0; d < p.decoders.size(); ++d)
    for (std::size_t i = 0; i < p.decoders[d].layers.size(); ++i)
      fn("dec" + std::to_string(d) + "." + std::to_string(i), p.decoders[d].layers[i]);
  if (with_classifier) fn(std::string("cls"), p.classifier);
}

void Append(std::vector<float>& out, const double* data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(static_cast<float>(data[i]));
}

class PayloadReader {
 public:
  PayloadReader(const std::vector<float>& payload, const std::filesystem::path& path)
      : payload_(payload), path_(path) {}

  void Read(double* data, Eigen::Index n) {
    if (pos_ + static_cast<std::size_t>(n) > payload_.size())
      throw Error(ErrorCode::kCorruptFile, path_.string() + ": checkpoint payload too short");
    for (Eigen::Index i = 0; i < n; ++i) data[i] = payload_[pos_++];
  }
  bool Exhausted() const { return pos_ == payload_.size(); }

 private:
  const std::vector<float>& payload_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

std::vector<int> ParseIntList(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return out;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

int CheckpointMeta::DecoderFor(int section_number) const {
  for (const auto& [section, decoder] : section_to_decoder)
    if (section == section_number) return decoder;
  throw Error(ErrorCode::kBadSection,
              "section " + std::to_string(section_number) + " has no decoder in this checkpoint");
}

void SaveCheckpoint(const std::filesystem::path& path, const AegmModel& model,
                    const CheckpointMeta& meta) {
  const AegmConfig& cfg = model.config();
  const AegmParams& p = model.params();
  Container c;
  c.magic = std::string(kCheckpointMagic);
  c.version = kCheckpointVersion;
  c.Set("machine", meta.machine);
  c.Set("input_dim", std::to_string(cfg.input_dim));
  c.Set("encoder_layers", JoinInts(cfg.encoder_layers));
  c.Set("bottleneck_dim", std::to_string(cfg.bottleneck_dim));
  c.Set("num_sections", std::to_string(cfg.num_sections));
  c.Set("use_batch_norm", cfg.use_batch_norm ? "1" : "0");
  c.Set("use_classifier", cfg.use_classifier ? "1" : "0");
  c.Set("model_config_hash", HashToHex(Fnv1a64(cfg.Canonical())));
  std::string mapping;
  for (const auto& [section, decoder] : meta.section_to_decoder) {
    if (!mapping.empty()) mapping += ',';
    mapping += std::to_string(section) + ":" + std::to_string(decoder);
  }
  c.Set("section_to_decoder", mapping);
  c.Set("feature_config_hash", HashToHex(meta.feature_config_hash));
  c.Set("feature_config", meta.feature_config);
  c.Set("seed", std::to_string(meta.seed));
  c.Set("epoch", std::to_string(meta.epoch));

  std::string shapes;
  ForEachLayer(p, cfg.use_classifier, [&](const std::string& name, const nn::DenseLayer& l) {
    if (!shapes.empty()) shapes += ';';
    shapes += name + ":" + std::to_string(l.in_dim()) + "x" + std::to_string(l.out_dim()) +
              (l.batch_norm ? ":bn" : "") +
              (l.activation == nn::Activation::kRelu ? ":relu" : ":linear");
  });
  c.Set("layer_shapes", shapes);
  if (cfg.use_batch_norm) {
    c.Set("bn_momentum", FormatExact(p.encoder.layers.front().batch_norm->momentum));
    c.Set("bn_epsilon", FormatExact(p.encoder.layers.front().batch_norm->epsilon));
  }

  Append(c.payload, p.input_mean.data(), p.input_mean.size());
  Append(c.payload, p.input_scale.data(), p.input_scale.size());
  ForEachLayer(p, cfg.use_classifier, [&](const std::string&, const nn::DenseLayer& l) {
    Append(c.payload, l.weight.data(), l.weight.size());
    Append(c.payload, l.bias.data(), l.bias.size());
    if (l.batch_norm) {
      const nn::BatchNorm& bn = *l.batch_norm;
      Append(c.payload, bn.gamma.data(), bn.gamma.size());
      Append(c.payload, bn.beta.data(), bn.beta.size());
      Append(c.payload, bn.running_mean.data(), bn.running_mean.size());
      Append(c.payload, bn.running_var.data(), bn.running_var.size());
    }
  });
  WriteContainer(path, c);
}

AegmModel LoadCheckpoint(const std::filesystem::path& path, CheckpointMeta* meta) {
  const Container c = ReadContainer(path, kCheckpointMagic);
  if (c.version != kCheckpointVersion)
    throw Error(ErrorCode::kUnsupportedFormat,
                path.string() + ": checkpoint version " + std::to_string(c.version));
  AegmConfig cfg;
  cfg.input_dim = static_cast<int>(c.GetInt("input_dim"));
  cfg.encoder_layers = ParseIntList(c.Get("encoder_layers"));
  cfg.bottleneck_dim = static_cast<int>(c.GetInt("bottleneck_dim"));
  cfg.num_sections = static_cast<int>(c.GetInt("num_sections"));
  cfg.use_batch_norm = c.GetInt("use_batch_norm") != 0;
  cfg.use_classifier = c.GetInt("use_classifier") != 0;
  if (HashToHex(Fnv1a64(cfg.Canonical())) != c.Get("model_config_hash"))
    throw Error(ErrorCode::kCorruptFile, path.string() + ": model config hash mismatch");

  AegmModel model(cfg);
  AegmParams& p = model.params();
  PayloadReader reader(c.payload, path);
  reader.Read(p.input_mean.data(), p.input_mean.size());
  reader.Read(p.input_scale.data(), p.input_scale.size());
  auto load = [&](const std::string&, nn::DenseLayer& l) {
    reader.Read(l.weight.data(), l.weight.size());
    reader.Read(l.bias.data(), l.bias.size());
    if (l.batch_norm) {
      nn::BatchNorm& bn = *l.batch_norm;
      reader.Read(bn.gamma.data(), bn.gamma.size());
      reader.Read(bn.beta.data(), bn.beta.size());
      reader.Read(bn.running_mean.data(), bn.running_mean.size());
      reader.Read(bn.running_var.data(), bn.running_var.size());
    }
  };
  ForEachLayer(p, cfg.use_classifier, load);
  if (!reader.Exhausted())
    throw Error(ErrorCode::kCorruptFile, path.string() + ": trailing checkpoint payload");

  if (meta) {
    meta->machine = c.Get("machine");
    meta->section_to_decoder.clear();
    std::stringstream ss(c.Get("section_to_decoder"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw Error(ErrorCode::kCorruptFile, path.string() + ": malformed section mapping");
      const int decoder = std::stoi(tok.substr(colon + 1));
      if (decoder < 0 || decoder >= cfg.num_sections)
        throw Error(ErrorCode::kCorruptFile, path.string() + ": section mapped to missing decoder");
      meta->section_to_decoder.emplace_back(std::stoi(tok.substr(0, colon)), decoder);
    }
    meta->feature_config_hash = std::stoull(c.Get("feature_config_hash"), nullptr, 16);
    meta->feature_config = c.Get("feature_config");
    meta->seed = std::stoull(c.Get("seed"));
    meta->epoch = static_cast<int>(c.GetInt("epoch"));
  }
  return model;
}

}  // namespace aegm
