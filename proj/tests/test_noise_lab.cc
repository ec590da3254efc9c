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

#include <set>

#include "doctest.h"
#include "oracles.h"
#include "relabel/noise_lab.h"
#include "relabel/synth.h"

namespace relabel {
namespace {

const TagSet kTs = TagSet::Default();

Label L(const char* name) { return *kTs.find(name); }

Corpus synth(std::size_t n, std::uint64_t seed, const char* prefix = "s") {
  SynthConfig cfg;
  cfg.utterances = n;
  cfg.seed = seed;
  cfg.id_prefix = prefix;
  return generate_corpus(cfg);
}

}  // namespace

TEST_SUITE("noise_lab") {

TEST_CASE("exact corruption count") {
  Corpus c;
  c.tag_set = kTs;
  for (int i = 0; i < 10; ++i) {
    c.utterances.push_back({"u" + std::to_string(i),
                            {"use", "Acme", "Corp", "now"},
                            {kOutside, L("B-ORG"), L("I-ORG"), kOutside},
                            0,
                            {}});
  }
  NoiseSpec spec;
  spec.rate = 0.2;
  spec.confusion = {{"ORG", "PROD", 1.0}};
  const NoisyCorpus n = inject_noise(c, spec);
  CHECK(n.ledger.size() == 2);
  std::size_t retyped = 0;
  for (const auto& u : n.corpus.utterances) {
    if (u.gold_tags ==
        std::vector<Label>{kOutside, L("B-PROD"), L("I-PROD"), kOutside}) {
      ++retyped;
      CHECK(n.ledger.contains(u.id));
      CHECK(n.ledger.entries.at(u.id).rule == "ORG->PROD");
    } else {
      CHECK(u == c.utterances[*c.find(u.id)]);
    }
  }
  CHECK(retyped == 2);
}

TEST_CASE("a rate that rounds to zero is an error") {
  Corpus c = synth(5, 1);
  NoiseSpec spec;
  spec.rate = 0.01;
  CHECK_THROWS_AS(inject_noise(c, spec), NoEligibleUtterances);
  spec.rate = 1.5;
  CHECK_THROWS_AS(inject_noise(c, spec), std::invalid_argument);
}

TEST_CASE("restoring from the ledger gives back the input") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Corpus clean = synth(300, rng.next());
    NoiseSpec spec;
    spec.rate = 0.05 + 0.5 * rng.unit();
    spec.drop_prob = trial % 2 ? 0.3 : 0.0;
    spec.seed = rng.next();
    const NoisyCorpus n = inject_noise(clean, spec);
    CHECK(n.ledger.size() > 0);
    for (const auto& u : n.corpus.utterances) {
      CHECK_FALSE(first_bio_violation(u.gold_tags, kTs).has_value());
      const bool changed = u.gold_tags != clean.utterances[*clean.find(u.id)].gold_tags;
      CHECK(changed == n.ledger.contains(u.id));
    }
    CHECK(restore(n.corpus, n.ledger).utterances == clean.utterances);
  }
}

TEST_CASE("noise is seeded") {
  const Corpus clean = synth(200, 2);
  NoiseSpec spec;
  spec.seed = 5;
  CHECK(inject_noise(clean, spec).corpus.utterances ==
        inject_noise(clean, spec).corpus.utterances);
}

TEST_CASE("detection scores") {
  CorruptionLedger ledger;
  std::set<std::string> flagged;
  for (int i = 0; i < 200; ++i) ledger.entries["c" + std::to_string(i)] = {};
  for (int i = 0; i < 60; ++i) flagged.insert("c" + std::to_string(i));
  for (int i = 0; i < 60; ++i) flagged.insert("x" + std::to_string(i));
  const auto s = evaluate_detection(flagged, ledger, 2000);
  CHECK(s.precision == doctest::Approx(0.5));
  CHECK(s.recall == doctest::Approx(0.3));
  CHECK(s.lift == doctest::Approx(5.0));

  std::set<std::string> all;
  for (const auto& [id, e] : ledger.entries) all.insert(id);
  const auto perfect = evaluate_detection(all, ledger, 2000);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);

  const auto miss = evaluate_detection({"x1", "x2"}, ledger, 2000);
  CHECK(miss.precision == 0.0);
  CHECK(miss.recall == 0.0);
}

TEST_CASE("full restoration recovers everything") {
  const Corpus clean = synth(400, 3);
  NoiseSpec spec;
  spec.rate = 0.3;
  const NoisyCorpus n = inject_noise(clean, spec);
  std::vector<ReviewDecision> all;
  for (const auto& [id, e] : n.ledger.entries) {
    all.push_back({id, Verdict::kCorrected, e.original_tags, "oracle", 1});
  }
  const Corpus repaired = merge_reannotations(n.corpus, all);
  TrainConfig cfg;
  CHECK(train(repaired, cfg, Capacity::kStudent).weights.serialize() ==
        train(clean, cfg, Capacity::kStudent).weights.serialize());
}

TEST_CASE("no flagged utterance means no recovery") {
  const Corpus clean = synth(600, 8);
  const Corpus eval_set = synth(300, 9, "e");
  RecoveryConfig cfg;
  cfg.noise.rate = 0.3;
  cfg.loop.train.epochs = 3;
  cfg.student_train.epochs = 3;
  cfg.loop.flag.threshold = 1e9;
  const RecoveryReport r = f1_recovery_experiment(clean, cfg, eval_set);
  CHECK(r.flagged == 0);
  const auto& org = r.type("ORG");
  CHECK(org.repaired.f1 == org.corrupted.f1);
  REQUIRE(org.recovery_fraction.has_value());
  CHECK(*org.recovery_fraction == 0.0);
  CHECK(format_recovery_table(r).find("ORG") != std::string::npos);
}

}  // TEST_SUITE

}  // namespace relabel
