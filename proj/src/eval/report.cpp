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

#include "aegm/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aegm/common/error.hpp"

namespace aegm::eval {
namespace {

template <typename T>
void AddUnique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

std::string Percent(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string SectionLabel(int section_number) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", section_number);
  return buf;
}

const SummaryMetric* EvalReport::Machine(const std::string& machine, const std::string& mode) const {
  for (const auto& m : machines)
    if (m.machine == machine && m.mode == mode) return &m;
  return nullptr;
}

const SummaryMetric* EvalReport::Overall(const std::string& mode) const {
  for (const auto& m : overall)
    if (m.mode == mode) return &m;
  return nullptr;
}

EvalReport AssembleReport(std::vector<SectionMetric> sections) {
  EvalReport report;
  std::vector<std::string> machines, modes;
  for (const auto& s : sections) {
    AddUnique(machines, s.machine);
    AddUnique(modes, s.mode);
  }
  for (const auto& mode : modes) {
    double auc_sum = 0.0, pauc_sum = 0.0;
    int machine_count = 0;
    for (const auto& machine : machines) {
      double a = 0.0, p = 0.0;
      int n = 0;
      for (const auto& s : sections) {
        if (s.machine != machine || s.mode != mode) continue;
        a += s.auc;
        p += s.pauc;
        ++n;
      }
      if (n == 0) continue;
      report.machines.push_back({machine, mode, a / n, p / n});
      auc_sum += a / n;
      pauc_sum += p / n;
      ++machine_count;
    }
    report.overall.push_back({kAverageMachine, mode, auc_sum / machine_count, pauc_sum / machine_count});
  }
  report.sections = std::move(sections);
  return report;
}

EvalReport BuildReport(std::span<const ScoreGroup> groups, double p) {
  std::vector<SectionMetric> sections;
  for (const auto& g : groups) {
    SectionMetric m{g.machine, SectionLabel(g.section), g.mode, 0.0, 0.0};
    try {
      m.auc = Auc(g.scores);
      m.pauc = Pauc(g.scores, p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kOneClassOnly) throw;
      throw Error(ErrorCode::kOneClassOnly, "machine " + g.machine + ", section " + m.section +
                                                ", mode " + g.mode + ": " + e.what());
    }
    sections.push_back(std::move(m));
  }
  return AssembleReport(std::move(sections));
}

std::string EvalReport::ToText() const {
  std::vector<std::string> machine_names, modes;
  for (const auto& m : machines) {
    AddUnique(machine_names, m.machine);
    AddUnique(modes, m.mode);
  }
  std::ostringstream out;
  auto cell = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  const std::size_t w = 16;
  out << "AUC/pAUC (%)\n";
  out << cell("Method", w);
  for (const auto& mn : machine_names) out << cell(mn, w);
  out << cell("Average", w) << '\n';
  for (const auto& mode : modes) {
    out << cell(mode, w);
    for (const auto& mn : machine_names) {
      const SummaryMetric* m = Machine(mn, mode);
      out << cell(m ? Percent(m->auc) + "/" + Percent(m->pauc) : "-", w);
    }
    const SummaryMetric* o = Overall(mode);
    out << cell(o ? Percent(o->auc) + "/" + Percent(o->pauc) : "-", w) << '\n';
  }
  out << "\nPer section\n";
  out << cell("Machine", w) << cell("Section", w) << cell("Mode", w) << cell("AUC", w) << "pAUC\n";
  for (const auto& s : sections)
    out << cell(s.machine, w) << cell(s.section, w) << cell(s.mode, w) << cell(Percent(s.auc), w)
        << Percent(s.pauc) << '\n';
  return out.str();
}

void EvalReport::WriteCsv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << "machine,section,mode,auc,pauc\n";
  for (const auto& s : sections)
    out << s.machine << ',' << s.section << ',' << s.mode << ',' << Fixed(s.auc) << ',' << Fixed(s.pauc) << '\n';
  for (const auto& m : machines)
    out << m.machine << ',' << kMeanSection << ',' << m.mode << ',' << Fixed(m.auc) << ',' << Fixed(m.pauc) << '\n';
  for (const auto& m : overall)
    out << m.machine << ',' << kMeanSection << ',' << m.mode << ',' << Fixed(m.auc) << ',' << Fixed(m.pauc) << '\n';
}

}  // namespace aegm::eval
