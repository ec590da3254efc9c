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

// Distill-then-fine-tune: a teacher tagger labels an unlabeled pool, the
// student trains on those pseudo labels and then on the gold set.

#ifndef RELABEL_DISTILL_H_
#define RELABEL_DISTILL_H_

#include <string>
#include <vector>

#include "relabel/corpus.h"
#include "relabel/model.h"
#include "relabel/trainer.h"

namespace relabel {

struct PseudoLabeledSet {
  Corpus corpus;  // source = pseudo_labeled, sorted by id
  std::string teacher_fingerprint;
  double confidence_floor = 0.0;
};

inline constexpr double kDefaultConfidenceFloor = 0.7;

// Viterbi-decodes every utterance with `teacher` and keeps those whose least
// confident token (max marginal) reaches `confidence_floor`; 0 keeps all.
PseudoLabeledSet pseudo_label(const ModelWeights& teacher,
                              const Corpus& unlabeled,
                              double confidence_floor = kDefaultConfidenceFloor);

struct TwoStageResult {
  ModelWeights student;
  std::string stage_a_fingerprint;  // empty when stage A was skipped
  std::vector<double> stage_a_loss;
  std::vector<double> stage_b_loss;
};

// Stage A: student-capacity training on the pseudo corpus. Stage B:
// training on `gold` starting from the stage-A weights, same config.
TwoStageResult two_stage_train(const PseudoLabeledSet& pseudo,
                               const Corpus& gold, const TrainConfig& config);

// Pseudo set as CoNLL plus a one-line JSON sidecar
// {"teacher_fingerprint", "confidence_floor", "utterances"}.
void save_pseudo_labeled(const PseudoLabeledSet& set,
                         const std::string& conll_path,
                         const std::string& sidecar_path);
PseudoLabeledSet load_pseudo_labeled(const std::string& conll_path,
                                     const std::string& sidecar_path,
                                     const TagSet& tag_set);

}  // namespace relabel

#endif  // RELABEL_DISTILL_H_
