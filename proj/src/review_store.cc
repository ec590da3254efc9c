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

#include "relabel/review_store.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>

#include "relabel/records.h"

namespace relabel {

std::string_view to_string(ItemStatus s) {
  return s == ItemStatus::kDone ? "done" : "pending";
}

ReviewStore::ReviewStore(Corpus train, const std::vector<GapRecord>& queue,
                         std::string decision_log)
    : train_(std::move(train)), log_path_(std::move(decision_log)) {
  auto state = std::make_shared<QueueState>();
  state->train_size = train_.size();

  std::vector<std::string> order;
  std::map<std::string, ReviewItem> items;
  for (const auto& r : queue) {
    auto pos = train_.find(r.utterance_id);
    if (!pos) {
      throw ItemNotFound("queue refers to unknown utterance '" +
                         r.utterance_id + "'");
    }
    auto [it, inserted] = items.try_emplace(r.utterance_id);
    ReviewItem& item = it->second;
    if (inserted) {
      const Utterance& u = train_.utterances[*pos];
      item.utterance_id = u.id;
      item.tokens = u.tokens;
      item.current_tags = u.gold_tags;
      item.max_gap = r.gap;
      order.push_back(u.id);
    }
    item.max_gap = std::max(item.max_gap, r.gap);
    item.evidence.push_back(r);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&items](const std::string& a, const std::string& b) {
                     return items.at(a).max_gap > items.at(b).max_gap;
                   });
  for (const auto& id : order) {
    state->index[id] = state->items.size();
    state->items.push_back(std::move(items.at(id)));
  }

  if (!log_path_.empty() && std::filesystem::exists(log_path_)) {
    for (const auto& d : read_decisions(log_path_, train_.tag_set)) {
      auto it = state->index.find(d.utterance_id);
      if (it == state->index.end()) {
        throw ItemNotFound("decision log refers to unknown item '" +
                           d.utterance_id + "'");
      }
      apply(*state, d);
    }
  }
  state_ = std::move(state);
}

std::unique_ptr<ReviewStore> ReviewStore::open(const DataPaths& paths,
                                               const TagSet& tag_set) {
  Corpus train = read_conll_file(paths.train(), tag_set);
  std::vector<GapRecord> queue;
  if (std::filesystem::exists(paths.queue())) {
    queue = read_gap_records(paths.queue(), tag_set);
  }
  return std::make_unique<ReviewStore>(std::move(train), queue,
                                       paths.decisions());
}

std::shared_ptr<const QueueState> ReviewStore::snapshot() const {
  std::lock_guard<std::mutex> lock(snap_mu_);
  return state_;
}

void ReviewStore::apply(QueueState& state, const ReviewDecision& d) const {
  ReviewItem& item = state.items[state.index.at(d.utterance_id)];
  state.log.push_back(d);
  // Later timestamps supersede; equal timestamps resolve by log order.
  if (item.decision && d.timestamp < item.decision->timestamp) return;
  if (d.verdict == Verdict::kCorrected) {
    item.current_tags = d.new_tags;
  } else {
    item.current_tags = train_.utterances[*train_.find(d.utterance_id)].gold_tags;
  }
  item.decision = d;
  item.status = ItemStatus::kDone;
}

void ReviewStore::append_to_log(const ReviewDecision& d) {
  if (log_path_.empty()) return;
  const std::string line = to_json(d, train_.tag_set).dump() + "\n";
  const int fd = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) {
    throw std::runtime_error("cannot open decision log: " +
                             std::string(std::strerror(errno)));
  }
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw std::runtime_error("decision log write failed");
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

PostResult ReviewStore::post(ReviewDecision decision) {
  std::lock_guard<std::mutex> lock(write_mu_);
  auto current = snapshot();
  auto it = current->index.find(decision.utterance_id);
  if (it == current->index.end()) {
    throw ItemNotFound("no queued item '" + decision.utterance_id + "'");
  }
  const ReviewItem& item = current->items[it->second];
  const Utterance& u = train_.utterances[*train_.find(decision.utterance_id)];
  check_decision(decision, u, train_.tag_set);
  if (decision.verdict == Verdict::kCorrectAsIs) decision.new_tags.clear();

  if (item.decision && item.decision->annotator_id == decision.annotator_id &&
      item.decision->verdict == decision.verdict &&
      item.decision->new_tags == decision.new_tags) {
    return {item, false};
  }

  if (decision.timestamp == 0) {
    const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    std::int64_t last = 0;
    for (const auto& d : current->log) last = std::max(last, d.timestamp);
    decision.timestamp = std::max<std::int64_t>(now, last + 1);
  }

  auto next = std::make_shared<QueueState>(*current);
  apply(*next, decision);
  append_to_log(decision);
  PostResult result{next->items[next->index.at(decision.utterance_id)], true};
  {
    std::lock_guard<std::mutex> snap_lock(snap_mu_);
    state_ = std::move(next);
  }
  return result;
}

QueueStats ReviewStore::stats() const {
  auto s = snapshot();
  QueueStats st;
  for (const auto& item : s->items) {
    if (item.status == ItemStatus::kPending) {
      ++st.pending;
      continue;
    }
    ++st.done;
    if (item.decision->verdict == Verdict::kCorrected) {
      ++st.corrected;
    } else {
      ++st.accepted;
    }
  }
  if (s->train_size > 0) {
    st.flag_fraction_of_train =
        static_cast<double>(s->items.size()) / static_cast<double>(s->train_size);
  }
  return st;
}

Corpus ReviewStore::merged() const {
  return merge_reannotations(train_, snapshot()->log);
}

MergeSummary merge_files(const std::string& train_path,
                         const std::string& decision_log,
                         const std::string& out_path, const TagSet& tag_set) {
  Corpus train = read_conll_file(train_path, tag_set);
  std::vector<ReviewDecision> log;
  if (!decision_log.empty() && std::filesystem::exists(decision_log)) {
    log = read_decisions(decision_log, tag_set);
  }
  MergeSummary summary;
  summary.utterances = train.size();
  summary.decisions = log.size();
  if (log.empty()) {
    std::filesystem::copy_file(train_path, out_path,
                               std::filesystem::copy_options::overwrite_existing);
    return summary;
  }
  const Corpus merged = merge_reannotations(train, log);
  for (const auto& u : merged.utterances) {
    if (u.source == Source::kReannotated) ++summary.corrected;
  }
  write_conll_file(merged, out_path);
  return summary;
}

}  // namespace relabel
