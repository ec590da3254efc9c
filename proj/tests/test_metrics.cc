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

#include <map>
#include <set>
#include <tuple>

#include "doctest.h"
#include "oracles.h"
#include "relabel/metrics.h"

namespace relabel {
namespace {

const TagSet kTs = TagSet::Default();

Corpus one(const std::vector<EntitySpan>& spans, std::size_t n) {
  Corpus c;
  c.tag_set = kTs;
  Utterance u;
  u.id = "a";
  u.tokens.assign(n, "w");
  u.gold_tags = render_spans(spans, n, kTs);
  c.utterances.push_back(u);
  return c;
}

// Counts by set intersection over (utterance, type, start, end) tuples.
std::map<std::string, Counts> brute_counts(const Corpus& pred, const Corpus& gold) {
  using Key = std::tuple<std::string, std::string, std::size_t, std::size_t>;
  std::set<Key> p, g;
  for (const auto& u : pred.utterances) {
    for (const auto& s : extract_spans(u, kTs)) p.insert({u.id, s.entity_type, s.start, s.end});
  }
  for (const auto& u : gold.utterances) {
    for (const auto& s : extract_spans(u, kTs)) g.insert({u.id, s.entity_type, s.start, s.end});
  }
  std::map<std::string, Counts> out;
  for (const auto& t : kTs.entity_types()) out[t];
  for (const auto& k : p) (g.count(k) ? out[std::get<1>(k)].tp : out[std::get<1>(k)].fp)++;
  for (const auto& k : g) {
    if (!p.count(k)) out[std::get<1>(k)].fn++;
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("identity scores 100") {
  const Corpus c = one({{"ORG", 0, 2}, {"PER", 3, 4}}, 5);
  const auto r = entity_f1(c, c);
  CHECK(r.overall.precision == 100.0);
  CHECK(r.overall.recall == 100.0);
  CHECK(r.overall.f1 == 100.0);
}

TEST_CASE("spurious prediction of an absent type") {
  const Corpus gold = one({{"ORG", 0, 1}}, 5);
  const Corpus pred = one({{"ORG", 0, 1}, {"PROD", 3, 4}}, 5);
  const auto r = entity_f1(pred, gold);
  CHECK(r.type("ORG").scores.f1 == 100.0);
  CHECK(r.type("PROD").scores.precision == 0.0);
  CHECK(r.type("PROD").scores.recall == 0.0);
  CHECK(r.type("PROD").scores.f1 == 0.0);
  CHECK(r.overall.precision == doctest::Approx(50.0));
  CHECK(r.overall.recall == doctest::Approx(100.0));
  CHECK(r.overall.f1 == doctest::Approx(66.6667).epsilon(1e-4));
  CHECK(format_report(r).find("overall\t50.00\t100.00\t66.67\t1\t1\t0") !=
        std::string::npos);
}

TEST_CASE("boundary mismatch counts as one miss and one false alarm") {
  const auto r = entity_f1(one({{"ORG", 0, 1}}, 3), one({{"ORG", 0, 2}}, 3));
  CHECK(r.type("ORG").counts == Counts{0, 1, 1});
  CHECK(r.type("ORG").scores.f1 == 0.0);
}

TEST_CASE("report layout") {
  const Corpus c = one({{"ORG", 0, 1}}, 2);
  const std::string text = format_report(entity_f1(c, c));
  CHECK(text.rfind("type\tprecision\trecall\tf1\ttp\tfp\tfn\n", 0) == 0);
  CHECK(text.find("ORG\t100.00\t100.00\t100.00\t1\t0\t0\n") != std::string::npos);
}

TEST_CASE("misaligned corpora are rejected") {
  const Corpus a = one({}, 2);
  Corpus b = one({}, 3);
  CHECK_THROWS_AS(entity_f1(a, b), MisalignedCorpora);
  b.utterances[0].id = "zz";
  CHECK_THROWS_AS(entity_f1(a, b), MisalignedCorpora);
}

TEST_CASE("random corpora: brute-force counts, symmetry, order invariance") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const Corpus gold = oracle::random_corpus(rng, 20, kTs);
    Corpus pred = gold;
    for (auto& u : pred.utterances) {
      if (rng.bernoulli(0.5)) u.gold_tags = oracle::random_tags(rng, u.size(), kTs);
    }
    const auto r = entity_f1(pred, gold);
    const auto truth = brute_counts(pred, gold);
    Counts total;
    for (const auto& t : r.per_type) {
      CHECK(t.counts == truth.at(t.type));
      total += t.counts;
    }
    CHECK(r.overall_counts == total);

    const auto swapped = entity_f1(gold, pred);
    CHECK(swapped.overall.precision == doctest::Approx(r.overall.recall));
    CHECK(swapped.overall.recall == doctest::Approx(r.overall.precision));
    CHECK(swapped.overall.f1 == doctest::Approx(r.overall.f1));

    Corpus shuffled = pred;
    rng.shuffle(std::span<Utterance>(shuffled.utterances));
    CHECK(format_report(entity_f1(shuffled, gold)) == format_report(r));
  }
}

}  // TEST_SUITE

}  // namespace relabel
