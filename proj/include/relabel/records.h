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

// Line-delimited JSON records exchanged between pipeline stages: gap
// records (queue.jsonl, gaps.jsonl), review decisions (decisions.jsonl),
// fold plans, corruption ledgers and recovery reports.
//
// Tags are written as label names. Non-finite gaps are written as the
// strings "inf" / "-inf".

#ifndef RELABEL_RECORDS_H_
#define RELABEL_RECORDS_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "relabel/active_loop.h"
#include "relabel/corpus.h"
#include "relabel/noise_lab.h"

namespace relabel {

using Json = nlohmann::ordered_json;

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite values as numbers, otherwise "inf", "-inf" or "nan".
Json gap_to_json(double gap);
double gap_from_json(const Json& j);

Json to_json(const EntitySpan& span);
EntitySpan span_from_json(const Json& j);

Json to_json(const GapRecord& r, const TagSet& ts);
GapRecord gap_record_from_json(const Json& j, const TagSet& ts);

Json to_json(const ReviewDecision& d, const TagSet& ts);
// Throws RecordError on missing fields or unknown verdict, CorpusError on
// unknown label names.
ReviewDecision decision_from_json(const Json& j, const TagSet& ts);

Json to_json(const RecoveryReport& report);

// JSONL helpers. Readers skip blank lines; a final line without a trailing
// newline that fails to parse (a torn append) is ignored.
std::vector<Json> read_jsonl(const std::string& path);
void write_jsonl(const std::vector<Json>& rows, const std::string& path);

std::vector<GapRecord> read_gap_records(const std::string& path,
                                        const TagSet& ts);
void write_gap_records(const std::vector<GapRecord>& records,
                       const std::string& path, const TagSet& ts);

std::vector<ReviewDecision> read_decisions(const std::string& path,
                                           const TagSet& ts);

void write_fold_plan(const FoldPlan& plan, const std::string& path);
void write_ledger(const CorruptionLedger& ledger, const std::string& path,
                  const TagSet& ts);
CorruptionLedger read_ledger(const std::string& path, const TagSet& ts);

}  // namespace relabel

#endif  // RELABEL_RECORDS_H_
