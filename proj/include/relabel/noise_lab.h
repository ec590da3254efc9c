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

// Controlled label corruption and the experiments that score detection and
// F1 recovery against the known corruptions.

#ifndef RELABEL_NOISE_LAB_H_
#define RELABEL_NOISE_LAB_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "relabel/active_loop.h"
#include "relabel/corpus.h"
#include "relabel/metrics.h"

namespace relabel {

struct ConfusionRule {
  std::string from;
  std::string to;
  double weight = 1.0;
};

struct NoiseSpec {
  // Fraction of eligible utterances to corrupt, in (0, 1).
  double rate = 0.1;
  std::vector<ConfusionRule> confusion = {{"ORG", "PROD", 1.0},
                                          {"PROD", "ORG", 1.0}};
  // Chance that a corrupted utterance loses one entity instead of retyping.
  double drop_prob = 0.0;
  std::uint64_t seed = 0;
};

struct LedgerEntry {
  std::vector<Label> original_tags;
  std::vector<Label> corrupted_tags;
  std::string rule;  // "ORG->PROD" or "drop:ORG"
};

struct CorruptionLedger {
  std::map<std::string, LedgerEntry> entries;

  bool contains(const std::string& id) const { return entries.count(id) > 0; }
  std::size_t size() const { return entries.size(); }
};

class NoEligibleUtterances : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NoisyCorpus {
  Corpus corpus;
  CorruptionLedger ledger;
};

// Utterances holding a span of some rule's source type are eligible. Exactly
// round(rate * |eligible|) of them are corrupted, each in one uniformly
// chosen eligible span.
NoisyCorpus inject_noise(const Corpus& corpus, const NoiseSpec& spec);

// Puts every ledger entry's original tags back.
Corpus restore(const Corpus& corrupted, const CorruptionLedger& ledger);

struct DetectionScores {
  double precision = 0.0;
  double recall = 0.0;
  double lift = 0.0;
};

DetectionScores evaluate_detection(const std::set<std::string>& flagged,
                                   const CorruptionLedger& ledger,
                                   std::size_t train_size);

struct TypeRecovery {
  std::string type;
  Scores clean;
  Scores corrupted;
  Scores repaired;
  // (repaired - corrupted) / (clean - corrupted) on F1; unset when the
  // denominator is not positive.
  std::optional<double> recovery_fraction;
};

struct RecoveryReport {
  std::vector<TypeRecovery> per_type;
  TypeRecovery overall;
  DetectionScores detection;
  std::size_t corrupted = 0;
  std::size_t flagged = 0;
  std::size_t train_size = 0;

  const TypeRecovery& type(const std::string& name) const;
};

class DegenerateExperiment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecoveryConfig {
  NoiseSpec noise;
  LoopConfig loop;
  // Trains the three compared taggers.
  TrainConfig student_train;
  Capacity student_capacity = Capacity::kStudent;
};

// Corrupts `clean`, runs the detection loop on the corrupted copy, restores
// the flagged utterances from the ledger (an ideal re-annotator), and trains
// a tagger on each of clean / corrupted / repaired data, scoring all three on
// `eval_set`. Throws DegenerateExperiment when the clean model does not beat
// the corrupted one on the first focus type.
RecoveryReport f1_recovery_experiment(const Corpus& clean,
                                      const RecoveryConfig& config,
                                      const Corpus& eval_set);

// Original-vs-repaired table, one row per type plus overall.
std::string format_recovery_table(const RecoveryReport& report);

}  // namespace relabel

#endif  // RELABEL_NOISE_LAB_H_
