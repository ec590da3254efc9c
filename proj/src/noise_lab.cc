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

#include "relabel/noise_lab.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "relabel/model.h"
#include "relabel/rng.h"
#include "relabel/trainer.h"

namespace relabel {

NoisyCorpus inject_noise(const Corpus& corpus, const NoiseSpec& spec) {
  if (!(spec.rate > 0.0 && spec.rate < 1.0)) {
    throw std::invalid_argument("noise rate must be in (0, 1)");
  }
  if (!(spec.drop_prob >= 0.0 && spec.drop_prob <= 1.0)) {
    throw std::invalid_argument("drop_prob must be in [0, 1]");
  }
  const TagSet& ts = corpus.tag_set;
  std::set<std::string> sources;
  for (const auto& r : spec.confusion) {
    if (!ts.find_type(r.from) || !ts.find_type(r.to) || r.from == r.to ||
        !(r.weight > 0.0)) {
      throw std::invalid_argument("bad confusion rule " + r.from + "->" + r.to);
    }
    sources.insert(r.from);
  }

  auto eligible_spans = [&](const Utterance& u) {
    std::vector<EntitySpan> out;
    for (auto& s : extract_spans(u, ts)) {
      if (sources.count(s.entity_type)) out.push_back(s);
    }
    return out;
  };

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!eligible_spans(corpus.utterances[i]).empty()) eligible.push_back(i);
  }
  const auto count = static_cast<std::size_t>(
      std::llround(spec.rate * static_cast<double>(eligible.size())));
  if (eligible.empty() || count == 0) {
    throw NoEligibleUtterances(
        "noise rate selects no utterances (" + std::to_string(eligible.size()) +
        " eligible)");
  }

  Rng rng(spec.seed, 0x401e);
  rng.shuffle(std::span<std::size_t>(eligible));
  eligible.resize(count);
  std::sort(eligible.begin(), eligible.end());

  NoisyCorpus out{corpus, {}};
  for (std::size_t idx : eligible) {
    Utterance& u = out.corpus.utterances[idx];
    const auto spans = eligible_spans(u);
    const EntitySpan span = spans[rng.below(spans.size())];
    LedgerEntry entry{u.gold_tags, {}, {}};
    if (rng.bernoulli(spec.drop_prob)) {
      for (std::size_t k = span.start; k < span.end; ++k) {
        u.gold_tags[k] = kOutside;
      }
      entry.rule = "drop:" + span.entity_type;
    } else {
      double total = 0.0;
      for (const auto& r : spec.confusion) {
        if (r.from == span.entity_type) total += r.weight;
      }
      double x = rng.unit() * total;
      const ConfusionRule* chosen = nullptr;
      for (const auto& r : spec.confusion) {
        if (r.from != span.entity_type) continue;
        chosen = &r;
        x -= r.weight;
        if (x < 0.0) break;
      }
      const std::size_t to = *ts.find_type(chosen->to);
      u.gold_tags[span.start] = ts.begin_label(to);
      for (std::size_t k = span.start + 1; k < span.end; ++k) {
        u.gold_tags[k] = ts.inside_label(to);
      }
      entry.rule = chosen->from + "->" + chosen->to;
    }
    entry.corrupted_tags = u.gold_tags;
    out.ledger.entries.emplace(u.id, std::move(entry));
  }
  return out;
}

Corpus restore(const Corpus& corrupted, const CorruptionLedger& ledger) {
  Corpus out = corrupted;
  for (auto& u : out.utterances) {
    auto it = ledger.entries.find(u.id);
    if (it != ledger.entries.end()) u.gold_tags = it->second.original_tags;
  }
  return out;
}

DetectionScores evaluate_detection(const std::set<std::string>& flagged,
                                   const CorruptionLedger& ledger,
                                   std::size_t train_size) {
  DetectionScores s;
  if (flagged.empty()) return s;
  std::size_t hits = 0;
  for (const auto& id : flagged) hits += ledger.contains(id) ? 1 : 0;
  s.precision = static_cast<double>(hits) / static_cast<double>(flagged.size());
  if (ledger.size() > 0) {
    s.recall = static_cast<double>(hits) / static_cast<double>(ledger.size());
    if (train_size > 0) {
      const double base = static_cast<double>(ledger.size()) /
                          static_cast<double>(train_size);
      s.lift = s.precision / base;
    }
  }
  return s;
}

const TypeRecovery& RecoveryReport::type(const std::string& name) const {
  for (const auto& t : per_type) {
    if (t.type == name) return t;
  }
  throw std::out_of_range("no entity type '" + name + "' in recovery report");
}

namespace {

std::optional<double> recovery(double clean, double corrupted,
                               double repaired) {
  if (!(clean - corrupted > 0.0)) return std::nullopt;
  return (repaired - corrupted) / (clean - corrupted);
}

EvalReport train_and_score(const Corpus& train_set, const RecoveryConfig& cfg,
                           const Corpus& eval_set) {
  auto model = train(train_set, cfg.student_train, cfg.student_capacity).weights;
  return entity_f1(predict_corpus(model, eval_set), eval_set);
}

}  // namespace

RecoveryReport f1_recovery_experiment(const Corpus& clean,
                                      const RecoveryConfig& config,
                                      const Corpus& eval_set) {
  NoisyCorpus noisy = inject_noise(clean, config.noise);
  LoopResult loop = run_active_loop(noisy.corpus, config.loop);

  // An ideal re-annotator restores what the ledger says was corrupted and
  // accepts everything else it is shown.
  std::vector<ReviewDecision> decisions;
  for (const auto& id : loop.selected) {
    auto it = noisy.ledger.entries.find(id);
    if (it == noisy.ledger.entries.end()) {
      decisions.push_back({id, Verdict::kCorrectAsIs, {}, "oracle", 0});
    } else {
      decisions.push_back(
          {id, Verdict::kCorrected, it->second.original_tags, "oracle", 0});
    }
  }
  const Corpus repaired = merge_reannotations(noisy.corpus, decisions);

  const EvalReport r_clean = train_and_score(clean, config, eval_set);
  const EvalReport r_corrupted = train_and_score(noisy.corpus, config, eval_set);
  const EvalReport r_repaired = train_and_score(repaired, config, eval_set);

  RecoveryReport report;
  report.corrupted = noisy.ledger.size();
  report.flagged = loop.selected.size();
  report.train_size = clean.size();
  report.detection = evaluate_detection(
      {loop.selected.begin(), loop.selected.end()}, noisy.ledger, clean.size());
  for (std::size_t t = 0; t < r_clean.per_type.size(); ++t) {
    TypeRecovery tr{r_clean.per_type[t].type, r_clean.per_type[t].scores,
                    r_corrupted.per_type[t].scores,
                    r_repaired.per_type[t].scores, std::nullopt};
    tr.recovery_fraction =
        recovery(tr.clean.f1, tr.corrupted.f1, tr.repaired.f1);
    report.per_type.push_back(std::move(tr));
  }
  report.overall = {"overall", r_clean.overall, r_corrupted.overall,
                    r_repaired.overall, std::nullopt};
  report.overall.recovery_fraction =
      recovery(r_clean.overall.f1, r_corrupted.overall.f1,
               r_repaired.overall.f1);

  const std::string focus = config.loop.flag.focus_types.empty()
                                ? std::string("ORG")
                                : *config.loop.flag.focus_types.begin();
  const TypeRecovery& f = report.type(focus);
  if (!(f.clean.f1 > f.corrupted.f1)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%s F1 clean %.2f <= corrupted %.2f; noise too weak",
                  focus.c_str(), f.clean.f1, f.corrupted.f1);
    throw DegenerateExperiment(buf);
  }
  return report;
}

std::string format_recovery_table(const RecoveryReport& report) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-10s | %7s %7s %7s | %7s %7s %7s | %7s | %8s\n",
                "type", "P", "R", "F1", "P", "R", "F1", "clean", "recovery");
  out << std::string(12, ' ') << "corrupted (original)      re-annotated\n";
  out << buf;
  auto row = [&](const TypeRecovery& t) {
    char rec[32] = "n/a";
    if (t.recovery_fraction) {
      std::snprintf(rec, sizeof(rec), "%.3f", *t.recovery_fraction);
    }
    std::snprintf(buf, sizeof(buf),
                  "%-10s | %7.2f %7.2f %7.2f | %7.2f %7.2f %7.2f | %7.2f | %8s\n",
                  t.type.c_str(), t.corrupted.precision, t.corrupted.recall,
                  t.corrupted.f1, t.repaired.precision, t.repaired.recall,
                  t.repaired.f1, t.clean.f1, rec);
    out << buf;
  };
  for (const auto& t : report.per_type) row(t);
  row(report.overall);
  std::snprintf(buf, sizeof(buf),
                "flagged %zu of %zu (%.2f%%); corrupted %zu; detection "
                "precision %.3f recall %.3f lift %.2f\n",
                report.flagged, report.train_size,
                report.train_size ? 100.0 * report.flagged / report.train_size
                                  : 0.0,
                report.corrupted, report.detection.precision,
                report.detection.recall, report.detection.lift);
  out << buf;
  return out.str();
}

}  // namespace relabel
