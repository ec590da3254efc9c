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

// File-backed review queue. The queue itself is immutable; the only
// mutation is an append to the decision log, and item state is always the
// replay of that log over the queue. Writers are serialized; readers work on
// immutable snapshots.

#ifndef RELABEL_REVIEW_STORE_H_
#define RELABEL_REVIEW_STORE_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relabel/active_loop.h"
#include "relabel/corpus.h"

namespace relabel {

enum class ItemStatus { kPending, kDone };
std::string_view to_string(ItemStatus s);

struct ReviewItem {
  std::string utterance_id;
  std::vector<std::string> tokens;
  std::vector<Label> current_tags;
  std::vector<GapRecord> evidence;
  double max_gap = 0.0;
  ItemStatus status = ItemStatus::kPending;
  std::optional<ReviewDecision> decision;

  bool operator==(const ReviewItem&) const = default;
};

struct QueueStats {
  std::size_t pending = 0;
  std::size_t done = 0;
  std::size_t corrected = 0;
  std::size_t accepted = 0;
  double flag_fraction_of_train = 0.0;
};

struct QueueState {
  std::vector<ReviewItem> items;  // max gap descending
  std::map<std::string, std::size_t> index;
  std::vector<ReviewDecision> log;
  std::size_t train_size = 0;
};

class ItemNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PostResult {
  ReviewItem item;
  bool appended = false;  // false for an exact duplicate
};

// Standard file names inside a data directory.
struct DataPaths {
  std::string dir;
  std::string train() const { return dir + "/train.conll"; }
  std::string queue() const { return dir + "/queue.jsonl"; }
  std::string gaps() const { return dir + "/gaps.jsonl"; }
  std::string folds() const { return dir + "/folds.jsonl"; }
  std::string decisions() const { return dir + "/decisions.jsonl"; }
  std::string merged() const { return dir + "/reannotated.conll"; }
  std::string meta() const { return dir + "/meta.json"; }
};

struct MergeSummary {
  std::size_t utterances = 0;
  std::size_t decisions = 0;
  std::size_t corrected = 0;
};

// Applies the decision log at `decision_log` to the corpus at `train_path`
// and writes the result to `out_path`. With no logged decisions the input
// bytes are copied unchanged.
MergeSummary merge_files(const std::string& train_path,
                         const std::string& decision_log,
                         const std::string& out_path, const TagSet& tag_set);

class ReviewStore {
 public:
  // Builds items from queue records (grouped per utterance, ordered by max
  // gap descending) and replays `decision_log` when it exists. An empty log
  // path keeps decisions in memory only.
  ReviewStore(Corpus train, const std::vector<GapRecord>& queue,
              std::string decision_log);

  // Reads train.conll, queue.jsonl and decisions.jsonl from `paths`.
  static std::unique_ptr<ReviewStore> open(const DataPaths& paths,
                                           const TagSet& tag_set);

  std::shared_ptr<const QueueState> snapshot() const;
  const Corpus& train() const { return train_; }
  const TagSet& tag_set() const { return train_.tag_set; }

  // Validates and appends. Throws ItemNotFound, or MergeError(kInvalidTags)
  // for a corrected decision whose tags do not fit the utterance. A
  // timestamp of 0 is replaced by the wall clock (kept strictly increasing).
  PostResult post(ReviewDecision decision);

  QueueStats stats() const;
  // Training corpus with the logged decisions applied.
  Corpus merged() const;

 private:
  void apply(QueueState& state, const ReviewDecision& d) const;
  void append_to_log(const ReviewDecision& d);

  Corpus train_;
  std::string log_path_;
  std::mutex write_mu_;
  mutable std::mutex snap_mu_;
  std::shared_ptr<const QueueState> state_;
};

}  // namespace relabel

#endif  // RELABEL_REVIEW_STORE_H_
