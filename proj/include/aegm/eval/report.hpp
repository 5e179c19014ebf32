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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aegm/eval/metrics.hpp"

namespace aegm::eval {

// Section label used in report rows that hold means rather than sections.
inline constexpr const char* kMeanSection = "mean";
// Machine label of the cross-machine average rows.
inline constexpr const char* kAverageMachine = "average";

struct SectionMetric {
  std::string machine;
  std::string section;  // "00", "01", ...
  std::string mode;     // "gae", "ac", "ens", or any method name
  double auc = 0.0;
  double pauc = 0.0;
};

struct SummaryMetric {
  std::string machine;  // kAverageMachine for overall means
  std::string mode;
  double auc = 0.0;
  double pauc = 0.0;
};

struct EvalReport {
  std::vector<SectionMetric> sections;
  std::vector<SummaryMetric> machines;  // per machine: mean over its sections
  std::vector<SummaryMetric> overall;   // per mode: mean over machines

  const SummaryMetric* Machine(const std::string& machine, const std::string& mode) const;
  const SummaryMetric* Overall(const std::string& mode) const;

  // Method rows, machine columns, "AUC/pAUC" percentages.
  std::string ToText() const;
  // report.csv: machine,section,mode,auc,pauc
  void WriteCsv(const std::filesystem::path& path) const;
};

struct ScoreGroup {
  std::string machine;
  int section = 0;
  std::string mode;
  std::vector<LabeledScore> scores;
};

std::string SectionLabel(int section_number);

// Means are arithmetic; machines and modes keep first-appearance order.
EvalReport AssembleReport(std::vector<SectionMetric> sections);

// Throws OneClassOnly naming the offending group.
EvalReport BuildReport(std::span<const ScoreGroup> groups, double p = 0.1);

}  // namespace aegm::eval
