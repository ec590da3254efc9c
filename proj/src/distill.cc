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

#include "relabel/distill.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace relabel {

PseudoLabeledSet pseudo_label(const ModelWeights& teacher,
                              const Corpus& unlabeled,
                              double confidence_floor) {
  if (teacher.capacity() != Capacity::kTeacher) {
    throw std::invalid_argument("pseudo labels need a teacher-capacity model");
  }
  if (unlabeled.split != Split::kUnlabeled) {
    throw std::invalid_argument("pseudo labelling expects an unlabeled corpus");
  }
  PseudoLabeledSet out;
  out.teacher_fingerprint = teacher.fingerprint();
  out.confidence_floor = confidence_floor;
  out.corpus.tag_set = teacher.tag_set();
  out.corpus.split = Split::kTrain;

  for (const auto& u : unlabeled.utterances) {
    const Lattice lat = teacher.lattice(u.tokens);
    if (confidence_floor > 0.0) {
      const Matrix logm = log_marginals(lat);
      double least = 1.0;
      for (std::size_t i = 0; i < logm.rows(); ++i) {
        auto row = logm.row(i);
        least = std::min(least, std::exp(*std::max_element(row.begin(), row.end())));
      }
      if (least < confidence_floor) continue;
    }
    Utterance p = u;
    p.gold_tags = viterbi(lat).tags;
    p.source = Source::kPseudoLabeled;
    out.corpus.utterances.push_back(std::move(p));
  }
  std::sort(out.corpus.utterances.begin(), out.corpus.utterances.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  return out;
}

TwoStageResult two_stage_train(const PseudoLabeledSet& pseudo,
                               const Corpus& gold, const TrainConfig& config) {
  if (gold.empty()) throw std::invalid_argument("gold corpus is empty");
  TwoStageResult result{ModelWeights(gold.tag_set, Capacity::kStudent), {}, {},
                        {}};
  if (!pseudo.corpus.empty()) {
    auto a = train(pseudo.corpus, config, Capacity::kStudent);
    result.stage_a_fingerprint = a.weights.fingerprint();
    result.stage_a_loss = std::move(a.epoch_loss);
    result.student = std::move(a.weights);
  }
  auto b = train(gold, config, Capacity::kStudent,
                 pseudo.corpus.empty() ? nullptr : &result.student);
  result.stage_b_loss = std::move(b.epoch_loss);
  result.student = std::move(b.weights);
  return result;
}

void save_pseudo_labeled(const PseudoLabeledSet& set,
                         const std::string& conll_path,
                         const std::string& sidecar_path) {
  write_conll_file(set.corpus, conll_path);
  nlohmann::json meta = {{"teacher_fingerprint", set.teacher_fingerprint},
                         {"confidence_floor", set.confidence_floor},
                         {"utterances", set.corpus.size()}};
  std::ofstream out(sidecar_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + sidecar_path);
  out << meta.dump() << '\n';
}

PseudoLabeledSet load_pseudo_labeled(const std::string& conll_path,
                                     const std::string& sidecar_path,
                                     const TagSet& tag_set) {
  std::ifstream in(sidecar_path);
  if (!in) throw std::runtime_error("cannot open " + sidecar_path);
  const auto meta = nlohmann::json::parse(in);
  PseudoLabeledSet set;
  set.teacher_fingerprint = meta.at("teacher_fingerprint").get<std::string>();
  set.confidence_floor = meta.at("confidence_floor").get<double>();
  if (meta.at("utterances").get<std::size_t>() > 0) {
    set.corpus = read_conll_file(conll_path, tag_set);
    for (auto& u : set.corpus.utterances) u.source = Source::kPseudoLabeled;
  } else {
    set.corpus.tag_set = tag_set;
  }
  return set;
}

}  // namespace relabel
