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

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "relabel/cli.h"
#include "relabel/records.h"
#include "temp_dir.h"

namespace relabel {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "relabel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors") {
  const Run bogus = run({"bogus"});
  CHECK(bogus.code == kExitUsage);
  CHECK(bogus.err.find("Usage") != std::string::npos);
  CHECK(bogus.err.find("bogus") != std::string::npos);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"folds", "--folds", "1"}).code == kExitUsage);
  CHECK(run({"flag", "--gap-mode", "weird"}).code == kExitUsage);
  CHECK(run({"synth"}).code == kExitUsage);  // --out is required
  const Run help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("flag") != std::string::npos);
}

TEST_CASE("data errors") {
  testing::TempDir dir;
  CHECK(run({"ingest", dir.file("missing.conll"), "--data-dir", dir.str()}).code ==
        kExitData);
  testing::spit(dir.file("bad.conll"), "Google B-NOPE\n");
  const Run bad = run({"ingest", dir.file("bad.conll"), "--data-dir", dir.str()});
  CHECK(bad.code == kExitData);
  CHECK(bad.err.find("B-NOPE") != std::string::npos);
  testing::spit(dir.file("bio.conll"), "zoom B-PROD\ncrash I-ORG\n");
  CHECK(run({"ingest", dir.file("bio.conll"), "--strict", "--data-dir", dir.str()})
            .code == kExitData);
  CHECK(run({"ingest", dir.file("bio.conll"), "--data-dir", dir.str()}).code ==
        kExitOk);
  CHECK(run({"flag", "--data-dir", dir.file("nowhere")}).code == kExitData);
}

TEST_CASE("pipeline through the CLI") {
  testing::TempDir dir;
  const std::string d = dir.file("data");
  const std::string in = dir.file("in.conll");
  REQUIRE(run({"synth", "--out", in, "--utterances", "300", "--seed", "4"}).code == 0);
  const Run ingest = run({"ingest", in, "--data-dir", d});
  REQUIRE(ingest.code == 0);
  CHECK(ingest.out.find("300") != std::string::npos);
  CHECK(testing::slurp(d + "/train.conll") == testing::slurp(in));

  const Run folds = run({"folds", "--folds", "5", "--data-dir", d});
  CHECK(folds.code == 0);
  CHECK(folds.out.find("60 60 60 60 60") != std::string::npos);

  const Run flag = run({"flag", "--threshold", "2.0", "--folds", "5", "--focus",
                        "ORG", "--epochs", "2", "--data-dir", d});
  REQUIRE(flag.code == 0);
  CHECK(flag.out.find("flagged ") == 0);
  CHECK(std::filesystem::exists(d + "/queue.jsonl"));
  CHECK(std::filesystem::exists(d + "/gaps.jsonl"));
  CHECK(read_jsonl(d + "/folds.jsonl").size() == 300);
  for (const auto& j : read_jsonl(d + "/queue.jsonl")) {
    CHECK(j["span"]["entity_type"] == "ORG");
    CHECK(gap_from_json(j["gap"]) > 2.0);
  }

  const Run merge = run({"merge", "--data-dir", d});
  REQUIRE(merge.code == 0);
  CHECK(testing::slurp(d + "/reannotated.conll") == testing::slurp(d + "/train.conll"));

  const std::string model = dir.file("teacher.model");
  REQUIRE(run({"train", "--data-dir", d, "--epochs", "2", "--model-out", model}).code == 0);
  const Run eval = run({"eval", "--model", model, "--input", in, "--report-out",
                        dir.file("report.tsv")});
  CHECK(eval.code == 0);
  CHECK(eval.out.rfind("type\tprecision", 0) == 0);
  CHECK(testing::slurp(dir.file("report.tsv")) == eval.out);
  CHECK(run({"eval", "--model", model}).code == kExitUsage);

  const std::string pool = dir.file("pool.conll");
  REQUIRE(run({"synth", "--out", pool, "--utterances", "200", "--split",
               "unlabeled", "--id-prefix", "p", "--seed", "5"}).code == 0);
  const Run distill = run({"distill", "--data-dir", d, "--teacher", model,
                           "--unlabeled", pool, "--epochs", "2", "--model-out",
                           dir.file("student.model"), "--pseudo-out",
                           dir.file("pseudo.conll")});
  CHECK(distill.code == 0);
  CHECK(std::filesystem::exists(dir.file("pseudo.conll.json")));
  // A student cannot act as a teacher.
  CHECK(run({"distill", "--data-dir", d, "--teacher", dir.file("student.model"),
             "--unlabeled", pool}).code == kExitData);

  const Run corrupt = run({"corrupt", "--data-dir", d, "--rate", "0.2", "--seed", "3"});
  CHECK(corrupt.code == 0);
  CHECK(read_ledger(d + "/ledger.jsonl", TagSet::Default()).size() > 0);
}

TEST_CASE("the data directory can come from the environment") {
  testing::TempDir dir;
  const std::string in = dir.file("in.conll");
  REQUIRE(run({"synth", "--out", in, "--utterances", "20"}).code == 0);
  ::setenv("RELABEL_DATA_DIR", dir.file("envdata").c_str(), 1);
  const Run ingest = run({"ingest", in});
  ::unsetenv("RELABEL_DATA_DIR");
  CHECK(ingest.code == 0);
  CHECK(std::filesystem::exists(dir.file("envdata/train.conll")));
}

TEST_CASE("recover prints the comparison table") {
  testing::TempDir dir;
  REQUIRE(run({"synth", "--out", dir.file("clean.conll"), "--utterances", "600",
               "--seed", "8"}).code == 0);
  REQUIRE(run({"synth", "--out", dir.file("eval.conll"), "--utterances", "300",
               "--seed", "9", "--id-prefix", "e"}).code == 0);
  const Run r = run({"recover", "--input", dir.file("clean.conll"), "--eval",
                     dir.file("eval.conll"), "--rate", "0.3", "--epochs", "3",
                     "--budget", "0.06", "--report-out", dir.file("rec.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("recovery") != std::string::npos);
  const Json rep = Json::parse(testing::slurp(dir.file("rec.json")));
  CHECK(rep["train_size"] == 600);
}

}  // TEST_SUITE

}  // namespace relabel
