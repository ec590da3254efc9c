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

#include "relabel/active_loop.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "relabel/rng.h"

namespace relabel {

std::vector<std::string> FoldPlan::prediction_set(const Corpus& corpus,
                                                  int fold) const {
  std::vector<std::string> ids;
  for (const auto& u : corpus.utterances) {
    auto it = assignment.find(u.id);
    if (it != assignment.end() && it->second == fold) ids.push_back(u.id);
  }
  return ids;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (const auto& [id, f] : assignment) ++sizes.at(f);
  return sizes;
}

FoldPlan make_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count must be at least 2");
  if (corpus.size() < static_cast<std::size_t>(k)) {
    throw TooFewUtterances("cannot split " + std::to_string(corpus.size()) +
                           " utterances into " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  FoldPlan plan{k, seed, {}};
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    plan.assignment[corpus.utterances[order[pos]].id] =
        static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return plan;
}

FoldRun run_fold(const Corpus& corpus, const FoldPlan& plan, int fold,
                 const TrainConfig& config, Capacity capacity) {
  if (fold < 0 || fold >= plan.k) {
    throw std::out_of_range("fold " + std::to_string(fold) + " not in plan");
  }
  Corpus train_part;
  train_part.tag_set = corpus.tag_set;
  train_part.split = corpus.split;
  std::vector<const Utterance*> held_out;
  for (const auto& u : corpus.utterances) {
    auto it = plan.assignment.find(u.id);
    if (it == plan.assignment.end()) {
      throw std::invalid_argument("utterance " + u.id + " has no fold");
    }
    if (it->second == fold) {
      held_out.push_back(&u);
    } else {
      train_part.utterances.push_back(u);
    }
  }
  if (held_out.empty()) {
    throw std::invalid_argument("fold " + std::to_string(fold) +
                                " has an empty prediction set");
  }

  TrainConfig fold_config = config;
  fold_config.seed = config.seed + static_cast<std::uint64_t>(fold);
  FoldRun run{train(train_part, fold_config, capacity).weights, {}};
  for (const Utterance* u : held_out) {
    auto lat = run.model.lattice(u->tokens);
    auto decoded = viterbi(lat);
    run.predictions.push_back(
        {u->id, std::move(decoded.tags), log_marginals(lat), fold});
  }
  return run;
}

std::vector<GapRecord> score_gaps(const std::vector<FoldPrediction>& outputs,
                                  const Corpus& corpus, GapMode mode) {
  std::unordered_map<std::string, const FoldPrediction*> by_id;
  for (const auto& o : outputs) by_id.emplace(o.utterance_id, &o);

  const TagSet& ts = corpus.tag_set;
  auto score = [mode](const Matrix& m, std::size_t i, Label y) {
    return mode == GapMode::kLogMarginal ? m(i, y) : std::exp(m(i, y));
  };

  std::vector<GapRecord> records;
  for (const auto& u : corpus.utterances) {
    auto it = by_id.find(u.id);
    if (it == by_id.end()) continue;
    const FoldPrediction& p = *it->second;
    if (p.predicted_tags.size() != u.size() || p.log_scores.rows() != u.size()) {
      throw std::invalid_argument("prediction for " + u.id +
                                  " does not match its token count");
    }
    for (const auto& span : extract_spans(p.predicted_tags, ts)) {
      GapRecord rec{u.id, span, p.predicted_tags[span.start],
                    u.gold_tags[span.start], kNegInf, p.fold};
      for (std::size_t i = span.start; i < span.end; ++i) {
        const Label pt = p.predicted_tags[i];
        const Label gt = u.gold_tags[i];
        const double d = pt == gt ? 0.0
                                  : score(p.log_scores, i, pt) -
                                        score(p.log_scores, i, gt);
        if (d > rec.gap) {
          rec.gap = d;
          rec.p_tag = pt;
          rec.g_tag = gt;
        }
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

void FlagConfig::validate() const {
  if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
  if (budget && !(*budget > 0.0 && *budget <= 1.0)) {
    throw std::invalid_argument("budget must be in (0, 1]");
  }
}

bool flaggable(const GapRecord& record, const FlagConfig& config) {
  if (!(record.gap > config.threshold)) return false;
  if (record.p_tag == record.g_tag) return false;
  return config.focus_types.empty() ||
         config.focus_types.count(record.span.entity_type) > 0;
}

std::vector<std::string> select_for_reannotation(
    const std::vector<GapRecord>& gaps, const FlagConfig& config,
    std::size_t train_size) {
  config.validate();
  std::vector<std::string> order;
  std::unordered_map<std::string, double> best;
  for (const auto& r : gaps) {
    if (!flaggable(r, config)) continue;
    auto [it, inserted] = best.emplace(r.utterance_id, r.gap);
    if (inserted) {
      order.push_back(r.utterance_id);
    } else {
      it->second = std::max(it->second, r.gap);
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&best](const std::string& a, const std::string& b) {
                     return best.at(a) > best.at(b);
                   });
  if (config.budget) {
    const auto cap = static_cast<std::size_t>(
        std::floor(*config.budget * static_cast<double>(train_size)));
    if (order.size() > cap) order.resize(cap);
  }
  return order;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::kCorrected ? "corrected" : "correct_as_is";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  if (s == "corrected") return Verdict::kCorrected;
  if (s == "correct_as_is") return Verdict::kCorrectAsIs;
  return std::nullopt;
}

void check_decision(const ReviewDecision& decision, const Utterance& utterance,
                    const TagSet& tag_set) {
  if (decision.verdict != Verdict::kCorrected) return;
  if (decision.new_tags.size() != utterance.size()) {
    throw MergeError(MergeError::Kind::kInvalidTags,
                     "decision for " + utterance.id + " has " +
                         std::to_string(decision.new_tags.size()) +
                         " tags for " + std::to_string(utterance.size()) +
                         " tokens");
  }
  for (Label l : decision.new_tags) {
    if (l >= tag_set.size()) {
      throw MergeError(MergeError::Kind::kInvalidTags,
                       "decision for " + utterance.id + " has unknown label");
    }
  }
  if (auto pos = first_bio_violation(decision.new_tags, tag_set)) {
    throw MergeError(MergeError::Kind::kInvalidTags,
                     "decision for " + utterance.id +
                         " violates BIO at token " + std::to_string(*pos));
  }
}

Corpus merge_reannotations(const Corpus& corpus,
                           const std::vector<ReviewDecision>& decisions) {
  std::vector<std::size_t> order(decisions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return decisions[a].timestamp < decisions[b].timestamp;
  });

  std::map<std::size_t, const ReviewDecision*> latest;
  for (std::size_t idx : order) {
    const ReviewDecision& d = decisions[idx];
    auto pos = corpus.find(d.utterance_id);
    if (!pos) {
      throw MergeError(MergeError::Kind::kUnknownUtterance,
                       "unknown utterance '" + d.utterance_id + "'");
    }
    check_decision(d, corpus.utterances[*pos], corpus.tag_set);
    latest[*pos] = &d;
  }

  Corpus out = corpus;
  for (const auto& [pos, d] : latest) {
    Utterance& u = out.utterances[pos];
    ++u.revision;
    if (d->verdict == Verdict::kCorrected) {
      u.gold_tags = d->new_tags;
      u.source = Source::kReannotated;
    }
  }
  return out;
}

LoopResult run_active_loop(const Corpus& corpus, const LoopConfig& config) {
  config.flag.validate();
  LoopResult result;
  result.plan = make_folds(corpus, config.folds, config.fold_seed);
  std::vector<FoldPrediction> outputs;
  for (int f = 0; f < config.folds; ++f) {
    auto run = run_fold(corpus, result.plan, f, config.train, config.capacity);
    for (auto& p : run.predictions) outputs.push_back(std::move(p));
  }
  result.gaps = score_gaps(outputs, corpus, config.flag.mode);
  result.selected =
      select_for_reannotation(result.gaps, config.flag, corpus.size());
  return result;
}

}  // namespace relabel
