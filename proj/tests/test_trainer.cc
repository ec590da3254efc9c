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

#include <cmath>

#include "doctest.h"
#include "oracles.h"
#include "relabel/synth.h"
#include "relabel/trainer.h"

namespace relabel {
namespace {

Corpus small_synth(std::size_t n, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.utterances = n;
  cfg.seed = seed;
  return generate_corpus(cfg);
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("analytic gradient matches central differences") {
  const TagSet ts = TagSet::Default();
  Rng rng(31);
  for (int draw = 0; draw < 50; ++draw) {
    ModelWeights w(ts, draw % 2 ? Capacity::kStudent : Capacity::kTeacher);
    std::vector<std::string> toks;
    for (int i = 0; i < 3; ++i) toks.push_back(oracle::random_token(rng));
    oracle::randomize(w, toks, rng, 0.5);
    const auto gold = oracle::random_tags(rng, 3, ts);
    const auto rows = w.rows_for(w.features(toks));
    const double exact = static_cast<double>(oracle::enumerated_log_likelihood(
        w, rows, oracle::valid_paths(3, ts), gold));
    CHECK(std::abs(log_likelihood(w, rows, gold, nullptr) - exact) <= 1e-9);
    const auto r = oracle::check_gradient(w, toks, gold);
    CHECK(r.coordinates > 0);
    CHECK(r.max_relative_error <= 1e-4);
  }
}

TEST_CASE("log-likelihood of the gold path is never positive") {
  const TagSet ts({"ORG", "PROD"});
  Rng rng(8);
  for (int draw = 0; draw < 50; ++draw) {
    ModelWeights w(ts, Capacity::kTeacher);
    std::vector<std::string> toks;
    for (std::size_t i = 0, n = 1 + rng.below(5); i < n; ++i) {
      toks.push_back(oracle::random_token(rng));
    }
    oracle::randomize(w, toks, rng, 3.0);
    const auto rows = w.rows_for(w.features(toks));
    const auto gold = oracle::random_tags(rng, toks.size(), ts);
    CHECK(log_likelihood(w, rows, gold, nullptr) <= 1e-12);
  }
}

TEST_CASE("all-O corpus is learned") {
  Corpus c;
  c.tag_set = TagSet::Default();
  Rng rng(3);
  for (int k = 0; k < 40; ++k) {
    Utterance u;
    u.id = "o" + std::to_string(k);
    for (std::size_t i = 0, n = 2 + rng.below(5); i < n; ++i) {
      u.tokens.push_back(oracle::random_token(rng));
    }
    u.gold_tags.assign(u.tokens.size(), kOutside);
    c.utterances.push_back(std::move(u));
  }
  // Forty utterances make one default batch, so train to convergence with
  // smaller batches instead of five single steps.
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 30;
  const auto r = train(c, cfg, Capacity::kTeacher);
  for (const auto& u : c.utterances) {
    const Matrix m = token_marginals(r.weights, u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(m(i, kOutside) > 0.99);
  }
}

TEST_CASE("training is deterministic") {
  const Corpus c = small_synth(120, 4);
  TrainConfig cfg;
  cfg.seed = 17;
  const auto a = train(c, cfg, Capacity::kTeacher);
  const auto b = train(c, cfg, Capacity::kTeacher);
  CHECK(a.weights.serialize() == b.weights.serialize());
  CHECK(a.epoch_loss == b.epoch_loss);
  cfg.seed = 18;
  const auto other = train(c, cfg, Capacity::kTeacher);
  CHECK(other.weights.serialize() != a.weights.serialize());
}

TEST_CASE("epoch loss does not increase on a 50-utterance corpus") {
  const Corpus c = small_synth(50, 12);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 8;
  for (Capacity cap : {Capacity::kTeacher, Capacity::kStudent}) {
    const auto r = train(c, cfg, cap);
    REQUIRE(r.epoch_loss.size() == 10);
    for (std::size_t e = 1; e < r.epoch_loss.size(); ++e) {
      CHECK(r.epoch_loss[e] <= r.epoch_loss[e - 1] + 1e-6);
    }
    CHECK(r.weights.finite());
    CHECK(corpus_loss(r.weights, c, cfg.l2) ==
          doctest::Approx(r.epoch_loss.back()).epsilon(1e-12));
  }
}

TEST_CASE("long utterances are truncated, not rejected") {
  Corpus c = small_synth(20, 1);
  Utterance& u = c.utterances[0];
  while (u.size() < 30) {
    u.tokens.push_back("pad");
    u.gold_tags.push_back(kOutside);
  }
  TrainConfig cfg;
  cfg.max_sequence_length = 10;
  cfg.epochs = 1;
  const auto r = train(c, cfg, Capacity::kStudent);
  CHECK(r.truncated >= 1);
}

TEST_CASE("invalid configs are rejected") {
  TrainConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("model serialization round-trip") {
  const Corpus c = small_synth(80, 9);
  const auto r = train(c, TrainConfig{}, Capacity::kStudent);
  const std::string text = r.weights.serialize();
  const ModelWeights back = ModelWeights::deserialize(text);
  CHECK(back.serialize() == text);
  CHECK(back.fingerprint() == r.weights.fingerprint());
  CHECK(back.capacity() == Capacity::kStudent);
  for (const auto& u : c.utterances) {
    CHECK(viterbi_decode(back, u).tags == viterbi_decode(r.weights, u).tags);
  }
}

TEST_CASE("training continues from initial weights") {
  const Corpus c = small_synth(60, 2);
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto first = train(c, TrainConfig{}, Capacity::kStudent);
  const auto again = train(c, cfg, Capacity::kStudent, &first.weights);
  CHECK(again.weights.serialize() == first.weights.serialize());
}

}  // TEST_SUITE

}  // namespace relabel
