// Copyright 2026 The Relabel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relabel/metrics.h"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace relabel {

Scores Scores::from(const Counts& c) {
  Scores s;
  if (c.tp + c.fp > 0) s.precision = 100.0 * c.tp / (c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = 100.0 * c.tp / (c.tp + c.fn);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

const TypeReport& EvalReport::type(const std::string& name) const {
  for (const auto& t : per_type) {
    if (t.type == name) return t;
  }
  throw std::out_of_range("no entity type '" + name + "' in report");
}

EvalReport entity_f1(const Corpus& pred, const Corpus& gold) {
  const TagSet& ts = gold.tag_set;
  if (!(pred.tag_set == ts)) {
    throw MisalignedCorpora("prediction and gold use different tag sets");
  }
  if (pred.size() != gold.size()) {
    throw MisalignedCorpora("prediction has " + std::to_string(pred.size()) +
                            " utterances, gold has " +
                            std::to_string(gold.size()));
  }
  std::unordered_map<std::string, const Utterance*> by_id;
  for (const auto& u : pred.utterances) by_id.emplace(u.id, &u);

  std::vector<Counts> counts(ts.entity_types().size());
  for (const auto& g : gold.utterances) {
    auto it = by_id.find(g.id);
    if (it == by_id.end()) {
      throw MisalignedCorpora("utterance " + g.id + " missing from prediction");
    }
    const Utterance& p = *it->second;
    if (p.size() != g.size()) {
      throw MisalignedCorpora("utterance " + g.id + " token counts differ");
    }
    const auto gold_spans = extract_spans(g, ts);
    const auto pred_spans = extract_spans(p, ts);
    const std::set<EntitySpan> gold_set(gold_spans.begin(), gold_spans.end());
    const std::set<EntitySpan> pred_set(pred_spans.begin(), pred_spans.end());
    for (const auto& s : pred_spans) {
      auto& c = counts[*ts.find_type(s.entity_type)];
      if (gold_set.count(s)) {
        ++c.tp;
      } else {
        ++c.fp;
      }
    }
    for (const auto& s : gold_spans) {
      if (!pred_set.count(s)) ++counts[*ts.find_type(s.entity_type)].fn;
    }
  }

  EvalReport report;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    report.per_type.push_back(
        {ts.entity_types()[t], counts[t], Scores::from(counts[t])});
    report.overall_counts += counts[t];
  }
  report.overall = Scores::from(report.overall_counts);
  return report;
}

void write_report(const EvalReport& report, std::ostream& out) {
  auto row = [&out](const std::string& name, const Scores& s, const Counts& c) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.2f\t%.2f\t%.2f", s.precision, s.recall,
                  s.f1);
    out << name << '\t' << buf << '\t' << c.tp << '\t' << c.fp << '\t' << c.fn
        << '\n';
  };
  out << "type\tprecision\trecall\tf1\ttp\tfp\tfn\n";
  for (const auto& t : report.per_type) row(t.type, t.scores, t.counts);
  row("overall", report.overall, report.overall_counts);
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  write_report(report, out);
  return out.str();
}

}  // namespace relabel
