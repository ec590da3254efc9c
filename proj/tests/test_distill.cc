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

#include <filesystem>

#include "doctest.h"
#include "oracles.h"
#include "relabel/distill.h"
#include "relabel/synth.h"

namespace relabel {
namespace {

Corpus synth(std::size_t n, std::uint64_t seed, const char* prefix,
             Split split = Split::kTrain) {
  SynthConfig cfg;
  cfg.utterances = n;
  cfg.seed = seed;
  cfg.id_prefix = prefix;
  cfg.split = split;
  return generate_corpus(cfg);
}

const ModelWeights& teacher() {
  static const ModelWeights t =
      train(synth(300, 1, "g"), TrainConfig{}, Capacity::kTeacher).weights;
  return t;
}

}  // namespace

TEST_SUITE("distill") {

TEST_CASE("empty pool gives an empty set") {
  Corpus pool;
  pool.tag_set = TagSet::Default();
  pool.split = Split::kUnlabeled;
  const auto set = pseudo_label(teacher(), pool);
  CHECK(set.corpus.empty());
  CHECK(set.teacher_fingerprint == teacher().fingerprint());
}

TEST_CASE("an unreachable floor keeps nothing") {
  const Corpus pool = synth(100, 2, "p", Split::kUnlabeled);
  CHECK(pseudo_label(teacher(), pool, 1.0 + 1e-9).corpus.empty());
  CHECK(pseudo_label(teacher(), pool, 0.0).corpus.size() == pool.size());
}

TEST_CASE("pseudo labels equal an independent re-decode") {
  const Corpus pool = synth(200, 3, "p", Split::kUnlabeled);
  const auto set = pseudo_label(teacher(), pool, kDefaultConfidenceFloor);
  CHECK(set.corpus.size() > 0);
  CHECK(set.corpus.size() <= pool.size());
  const ModelWeights reloaded = ModelWeights::deserialize(teacher().serialize());
  CHECK(reloaded.fingerprint() == set.teacher_fingerprint);
  for (const auto& u : set.corpus.utterances) {
    CHECK(u.source == Source::kPseudoLabeled);
    CHECK(u.gold_tags == viterbi_decode(reloaded, u).tags);
    const Matrix m = token_marginals(reloaded, u);
    for (std::size_t i = 0; i < u.size(); ++i) {
      double best = 0.0;
      for (std::size_t y = 0; y < m.cols(); ++y) best = std::max(best, m(i, y));
      CHECK(best >= kDefaultConfidenceFloor);
    }
  }
}

TEST_CASE("pseudo labelling ignores pool order") {
  Corpus pool = synth(150, 4, "p", Split::kUnlabeled);
  const auto a = pseudo_label(teacher(), pool);
  Rng rng(1);
  rng.shuffle(std::span<Utterance>(pool.utterances));
  const auto b = pseudo_label(teacher(), pool);
  CHECK(a.corpus.utterances == b.corpus.utterances);
}

TEST_CASE("preconditions") {
  const Corpus labeled = synth(10, 5, "p");
  CHECK_THROWS_AS(pseudo_label(teacher(), labeled), std::invalid_argument);
  const ModelWeights student(TagSet::Default(), Capacity::kStudent);
  CHECK_THROWS_AS(pseudo_label(student, strip_labels(labeled)),
                  std::invalid_argument);
}

TEST_CASE("an empty pseudo set reduces to gold-only training") {
  const Corpus gold = synth(150, 6, "g");
  PseudoLabeledSet empty;
  empty.corpus.tag_set = gold.tag_set;
  TrainConfig cfg;
  cfg.seed = 3;
  const auto r = two_stage_train(empty, gold, cfg);
  CHECK(r.stage_a_fingerprint.empty());
  CHECK(r.stage_a_loss.empty());
  CHECK(r.student.serialize() ==
        train(gold, cfg, Capacity::kStudent).weights.serialize());
}

TEST_CASE("stage B does not undo stage A on identical data") {
  const Corpus gold = synth(150, 7, "g");
  PseudoLabeledSet same;
  same.corpus = gold;
  const auto r = two_stage_train(same, gold, TrainConfig{});
  REQUIRE_FALSE(r.stage_a_loss.empty());
  REQUIRE_FALSE(r.stage_b_loss.empty());
  CHECK(r.stage_b_loss.back() <= r.stage_a_loss.back() + 1e-9);
  CHECK(r.student.capacity() == Capacity::kStudent);
}

TEST_CASE("pseudo sets round-trip through files") {
  const Corpus pool = synth(60, 8, "p", Split::kUnlabeled);
  const auto set = pseudo_label(teacher(), pool, 0.5);
  const auto dir = std::filesystem::temp_directory_path() / "relabel_distill_test";
  std::filesystem::create_directories(dir);
  const std::string conll = (dir / "pseudo.conll").string();
  save_pseudo_labeled(set, conll, conll + ".json");
  const auto back = load_pseudo_labeled(conll, conll + ".json", TagSet::Default());
  CHECK(back.corpus.utterances == set.corpus.utterances);
  CHECK(back.teacher_fingerprint == set.teacher_fingerprint);
  CHECK(back.confidence_floor == set.confidence_floor);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE

}  // namespace relabel
