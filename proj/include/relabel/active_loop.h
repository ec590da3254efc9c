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

// N-fold annotation-error detection.
//
// The training set is partitioned into k disjoint prediction folds. For each
// fold a tagger is trained on the other k-1 folds and used to label the held
// out utterances. Every predicted entity span is compared with the gold tags
// at the same tokens; when the model's log-marginal for its own tag exceeds
// the log-marginal of the gold tag by more than a threshold, the utterance
// goes to human review.

#ifndef RELABEL_ACTIVE_LOOP_H_
#define RELABEL_ACTIVE_LOOP_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "relabel/corpus.h"
#include "relabel/model.h"
#include "relabel/trainer.h"

namespace relabel {

struct FoldPlan {
  int k = 5;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignment;  // utterance id -> fold

  // Ids assigned to `fold`, in corpus order.
  std::vector<std::string> prediction_set(const Corpus& corpus, int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

class TooFewUtterances : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Seeded shuffle followed by round-robin assignment; fold sizes differ by at
// most one. Requires k >= 2 and |corpus| >= k.
FoldPlan make_folds(const Corpus& corpus, int k, std::uint64_t seed);

struct FoldPrediction {
  std::string utterance_id;
  std::vector<Label> predicted_tags;
  Matrix log_scores;  // n x |labels| log-marginals
  int fold = 0;
};

struct FoldRun {
  ModelWeights model;
  std::vector<FoldPrediction> predictions;
};

// Trains on every utterance outside `fold` and predicts the utterances in it.
FoldRun run_fold(const Corpus& corpus, const FoldPlan& plan, int fold,
                 const TrainConfig& config, Capacity capacity);

enum class GapMode {
  kLogMarginal,  // nats
  kProbability,  // raw marginal difference, for sweeps
};

struct GapRecord {
  std::string utterance_id;
  EntitySpan span;  // predicted span
  Label p_tag = kOutside;
  Label g_tag = kOutside;
  double gap = 0.0;
  int fold = 0;

  bool operator==(const GapRecord&) const = default;
};

// One record per predicted span, in corpus order. The gap is the maximum
// over the span's tokens of score(predicted tag) - score(gold tag); p_tag
// and g_tag are taken at the first maximizing token.
std::vector<GapRecord> score_gaps(const std::vector<FoldPrediction>& outputs,
                                  const Corpus& corpus,
                                  GapMode mode = GapMode::kLogMarginal);

struct FlagConfig {
  double threshold = 2.0;
  // Entity types whose predicted spans may trigger a flag; empty = all.
  std::set<std::string> focus_types = {"ORG"};
  // Maximum flagged fraction of the training set, in (0, 1].
  std::optional<double> budget;
  GapMode mode = GapMode::kLogMarginal;

  void validate() const;
};

// True when the record alone would flag its utterance.
bool flaggable(const GapRecord& record, const FlagConfig& config);

// Utterance ids with at least one flaggable record, by maximum flaggable gap
// descending (ties keep first-seen order), truncated to
// floor(budget * train_size) when a budget is set.
std::vector<std::string> select_for_reannotation(
    const std::vector<GapRecord>& gaps, const FlagConfig& config,
    std::size_t train_size);

enum class Verdict { kCorrectAsIs, kCorrected };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

struct ReviewDecision {
  std::string utterance_id;
  Verdict verdict = Verdict::kCorrectAsIs;
  std::vector<Label> new_tags;  // full sequence when corrected
  std::string annotator_id;
  std::int64_t timestamp = 0;   // milliseconds since the epoch

  bool operator==(const ReviewDecision&) const = default;
};

class MergeError : public std::runtime_error {
 public:
  enum class Kind { kUnknownUtterance, kInvalidTags };
  MergeError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Checks a corrected decision's tags against the utterance; throws
// MergeError(kInvalidTags).
void check_decision(const ReviewDecision& decision, const Utterance& utterance,
                    const TagSet& tag_set);

// Applies the latest decision (by timestamp, then list order) for each
// reviewed utterance. Reviewed utterances get revision + 1; corrected ones
// take the new tags and source = reannotated.
Corpus merge_reannotations(const Corpus& corpus,
                           const std::vector<ReviewDecision>& decisions);

struct LoopConfig {
  int folds = 5;
  std::uint64_t fold_seed = 0;
  TrainConfig train;
  Capacity capacity = Capacity::kTeacher;
  FlagConfig flag;
};

struct LoopResult {
  FoldPlan plan;
  std::vector<GapRecord> gaps;
  std::vector<std::string> selected;
};

// make_folds -> run_fold for every fold -> score_gaps -> select.
LoopResult run_active_loop(const Corpus& corpus, const LoopConfig& config);

}  // namespace relabel

#endif  // RELABEL_ACTIVE_LOOP_H_
