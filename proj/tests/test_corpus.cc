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

#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "relabel/corpus.h"

namespace relabel {
namespace {

const TagSet kTs = TagSet::Default();

std::vector<Label> tags(std::initializer_list<const char*> names) {
  std::vector<Label> out;
  for (const char* n : names) out.push_back(*kTs.find(n));
  return out;
}

// Every interval that is a maximal B-X I-X* run, found by checking all
// (start, end) pairs.
std::vector<EntitySpan> brute_spans(const std::vector<Label>& t) {
  std::vector<EntitySpan> out;
  for (std::size_t s = 0; s < t.size(); ++s) {
    if (!kTs.is_begin(t[s])) continue;
    const Label inside = kTs.inside_label(kTs.type_of(t[s]));
    for (std::size_t e = s + 1; e <= t.size(); ++e) {
      bool run = true;
      for (std::size_t k = s + 1; k < e; ++k) run = run && t[k] == inside;
      const bool maximal = e == t.size() || t[e] != inside;
      if (run && maximal) out.push_back({kTs.type_name(t[s]), s, e});
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("tag set layout") {
  CHECK(kTs.labels() == std::vector<std::string>{"O", "B-PER", "I-PER", "B-PROD",
                                                 "I-PROD", "B-ORG", "I-ORG",
                                                 "B-GPE", "I-GPE"});
  CHECK(kTs.allowed(std::nullopt, *kTs.find("B-ORG")));
  CHECK_FALSE(kTs.allowed(std::nullopt, *kTs.find("I-ORG")));
  CHECK_FALSE(kTs.allowed(kOutside, *kTs.find("I-ORG")));
  CHECK_FALSE(kTs.allowed(*kTs.find("B-PROD"), *kTs.find("I-ORG")));
  CHECK(kTs.allowed(*kTs.find("I-ORG"), *kTs.find("I-ORG")));
}

TEST_CASE("empty stream is rejected") {
  try {
    parse_conll("", kTs);
    FAIL("expected an error");
  } catch (const CorpusError& e) {
    CHECK(e.kind() == CorpusError::Kind::kEmptyCorpus);
  }
}

TEST_CASE("minimal block") {
  const Corpus c = parse_conll("Google B-ORG\ncrash O\n\n", kTs);
  REQUIRE(c.size() == 1);
  CHECK(c.utterances[0].tokens == std::vector<std::string>{"Google", "crash"});
  CHECK(c.utterances[0].gold_tags == tags({"B-ORG", "O"}));
  CHECK(c.utterances[0].id == "u1");
}

TEST_CASE("strict mode reports the violating line") {
  ParseOptions strict;
  strict.mode = BioMode::kStrict;
  try {
    parse_conll("zoom B-PROD\ncrash I-ORG\n\n", kTs, strict);
    FAIL("expected an error");
  } catch (const CorpusError& e) {
    CHECK(e.kind() == CorpusError::Kind::kBioViolation);
    CHECK(e.line() == 2);
  }
  // The oracle agrees on the position.
  CHECK(first_bio_violation(tags({"B-PROD", "I-ORG"}), kTs) == 1u);
}

TEST_CASE("repair mode rewrites dangling inside tags") {
  const Corpus c = parse_conll("zoom B-PROD\ncrash I-ORG\n\n", kTs);
  CHECK(c.utterances[0].gold_tags == tags({"B-PROD", "B-ORG"}));
}

TEST_CASE("parse errors") {
  auto kind_of = [](std::string_view text) {
    try {
      parse_conll(text, kTs);
    } catch (const CorpusError& e) {
      return e.kind();
    }
    FAIL("expected an error");
    return CorpusError::Kind::kEmptyCorpus;
  };
  CHECK(kind_of("a B-FOO\n") == CorpusError::Kind::kUnknownLabel);
  CHECK(kind_of("a\tO\tx\n") == CorpusError::Kind::kRaggedLine);
  CHECK(kind_of("# id = x\na O\n\n# id = x\nb O\n") ==
        CorpusError::Kind::kDuplicateId);
  CHECK(kind_of("\tO\n") == CorpusError::Kind::kInvalidToken);
}

TEST_CASE("ids, comments, tabs and CRLF") {
  const Corpus c = parse_conll(
      "# id = first\r\nzoom\tB-PROD\r\n\r\n# a note\nhi O\n", kTs);
  REQUIRE(c.size() == 2);
  CHECK(c.utterances[0].id == "first");
  CHECK(c.utterances[1].id == "u2");
}

TEST_CASE("unlabeled split ignores given tags") {
  ParseOptions o;
  o.split = Split::kUnlabeled;
  const Corpus c = parse_conll("Google B-ORG\ncrash O\n", kTs, o);
  CHECK(c.split == Split::kUnlabeled);
  CHECK(c.utterances[0].gold_tags == tags({"O", "O"}));
}

TEST_CASE("validate_bio examples") {
  Utterance u{"x", {"a", "b", "c"}, tags({"O", "O", "O"}), 0, Source::kOriginal};
  CHECK(validate_bio(u, kTs, BioMode::kStrict) == u);

  u = Utterance{"x", {"a", "b"}, tags({"I-ORG", "O"}), 0, Source::kOriginal};
  CHECK(validate_bio(u, kTs, BioMode::kRepair).gold_tags == tags({"B-ORG", "O"}));
  CHECK_THROWS_AS(validate_bio(u, kTs, BioMode::kStrict), CorpusError);

  u.gold_tags = tags({"B-ORG", "I-PROD"});
  const auto fixed = validate_bio(u, kTs, BioMode::kRepair).gold_tags;
  CHECK(fixed == tags({"B-ORG", "B-PROD"}));
  CHECK(extract_spans(fixed, kTs) ==
        std::vector<EntitySpan>{{"ORG", 0, 1}, {"PROD", 1, 2}});
}

TEST_CASE("repair is idempotent and yields valid sequences") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Label> t(1 + rng.below(7));
    for (auto& x : t) x = static_cast<Label>(rng.below(kTs.size()));
    std::vector<Label> once = t;
    repair_bio(once, kTs);
    CHECK_FALSE(first_bio_violation(once, kTs).has_value());
    std::vector<Label> twice = once;
    CHECK(repair_bio(twice, kTs) == 0);
    CHECK(twice == once);
  }
}

TEST_CASE("extract_spans examples") {
  CHECK(extract_spans(tags({"O", "O"}), kTs).empty());
  CHECK(extract_spans(tags({"B-ORG", "I-ORG", "O"}), kTs) ==
        std::vector<EntitySpan>{{"ORG", 0, 2}});
  CHECK(extract_spans(tags({"B-ORG", "B-ORG"}), kTs) ==
        std::vector<EntitySpan>{{"ORG", 0, 1}, {"ORG", 1, 2}});
}

TEST_CASE("extract_spans matches brute-force segmentation") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto t = oracle::random_tags(rng, 1 + rng.below(9), kTs);
    const auto spans = extract_spans(t, kTs);
    CHECK(spans == brute_spans(t));
    CHECK(render_spans(spans, t.size(), kTs) == t);
  }
}

TEST_CASE("writer output for one utterance") {
  const Corpus c = parse_conll("# id = a\nGoogle B-ORG\ncrash O\n", kTs);
  CHECK(to_conll(c) == "# id = a\nGoogle\tB-ORG\ncrash\tO\n\n");
}

TEST_CASE("provenance lines round-trip") {
  Corpus c = parse_conll("# id = a\nGoogle B-ORG\n", kTs);
  c.utterances[0].revision = 2;
  c.utterances[0].source = Source::kReannotated;
  const Corpus back = parse_conll(to_conll(c), kTs);
  CHECK(back.utterances[0] == c.utterances[0]);
}

TEST_CASE("random corpora round-trip through CoNLL") {
  Rng rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    const Corpus c = oracle::random_corpus(rng, 50, kTs);
    const std::string text = to_conll(c);
    const Corpus back = parse_conll(text, kTs, {BioMode::kStrict, Split::kTrain});
    CHECK(back.utterances == c.utterances);
    CHECK(to_conll(back) == text);
  }
}

TEST_CASE("label names") {
  const auto t = tags({"B-GPE", "I-GPE", "O"});
  const auto names = label_names(t, kTs);
  CHECK(names == std::vector<std::string>{"B-GPE", "I-GPE", "O"});
  CHECK(parse_labels(names, kTs) == t);
  const std::vector<std::string> bad{"B-XYZ"};
  CHECK_THROWS_AS(parse_labels(bad, kTs), CorpusError);
}

}  // TEST_SUITE

}  // namespace relabel
