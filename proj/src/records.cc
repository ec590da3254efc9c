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

#include "relabel/records.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace relabel {
namespace {

Label label_from(const Json& j, const TagSet& ts) {
  const auto name = j.get<std::string>();
  auto l = ts.find(name);
  if (!l) {
    throw CorpusError(CorpusError::Kind::kUnknownLabel, 0,
                      "unknown label '" + name + "'");
  }
  return *l;
}

std::vector<Label> labels_from(const Json& j, const TagSet& ts) {
  std::vector<Label> out;
  for (const auto& x : j) out.push_back(label_from(x, ts));
  return out;
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw RecordError(std::string("malformed record: ") + e.what());
  }
}

}  // namespace

Json gap_to_json(double g) {
  if (std::isfinite(g)) return g;
  if (std::isnan(g)) return "nan";
  return g > 0 ? "inf" : "-inf";
}

double gap_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw RecordError("bad gap value '" + s + "'");
}

Json to_json(const EntitySpan& span) {
  return Json{{"entity_type", span.entity_type},
              {"start", span.start},
              {"end", span.end}};
}

EntitySpan span_from_json(const Json& j) {
  return guarded([&] {
    return EntitySpan{j.at("entity_type").get<std::string>(),
                      j.at("start").get<std::size_t>(),
                      j.at("end").get<std::size_t>()};
  });
}

Json to_json(const GapRecord& r, const TagSet& ts) {
  return Json{{"utterance_id", r.utterance_id},
              {"span", to_json(r.span)},
              {"p_tag", ts.name(r.p_tag)},
              {"g_tag", ts.name(r.g_tag)},
              {"gap", gap_to_json(r.gap)},
              {"fold", r.fold}};
}

GapRecord gap_record_from_json(const Json& j, const TagSet& ts) {
  return guarded([&] {
    return GapRecord{j.at("utterance_id").get<std::string>(),
                     span_from_json(j.at("span")),
                     label_from(j.at("p_tag"), ts),
                     label_from(j.at("g_tag"), ts),
                     gap_from_json(j.at("gap")),
                     j.at("fold").get<int>()};
  });
}

Json to_json(const ReviewDecision& d, const TagSet& ts) {
  Json j{{"utterance_id", d.utterance_id},
         {"verdict", std::string(to_string(d.verdict))},
         {"new_tags", label_names(d.new_tags, ts)},
         {"annotator_id", d.annotator_id},
         {"timestamp", d.timestamp}};
  return j;
}

ReviewDecision decision_from_json(const Json& j, const TagSet& ts) {
  return guarded([&] {
    if (!j.is_object()) throw RecordError("decision must be a JSON object");
    ReviewDecision d;
    d.utterance_id = j.at("utterance_id").get<std::string>();
    auto v = parse_verdict(j.at("verdict").get<std::string>());
    if (!v) throw RecordError("verdict must be correct_as_is or corrected");
    d.verdict = *v;
    if (j.contains("new_tags") && !j.at("new_tags").is_null()) {
      d.new_tags = labels_from(j.at("new_tags"), ts);
    }
    d.annotator_id = j.at("annotator_id").get<std::string>();
    d.timestamp = j.value("timestamp", std::int64_t{0});
    return d;
  });
}

Json to_json(const RecoveryReport& report) {
  auto scores = [](const Scores& s) {
    return Json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  };
  auto type_row = [&](const TypeRecovery& t) {
    Json row{{"type", t.type},
             {"clean", scores(t.clean)},
             {"corrupted", scores(t.corrupted)},
             {"repaired", scores(t.repaired)},
             {"f1_clean", t.clean.f1},
             {"f1_corrupted", t.corrupted.f1},
             {"f1_repaired", t.repaired.f1}};
    row["recovery_fraction"] =
        t.recovery_fraction ? Json(*t.recovery_fraction) : Json(nullptr);
    return row;
  };
  Json per_type = Json::array();
  for (const auto& t : report.per_type) per_type.push_back(type_row(t));
  return Json{{"per_type", per_type},
              {"overall", type_row(report.overall)},
              {"detection",
               {{"precision", report.detection.precision},
                {"recall", report.detection.recall},
                {"lift", report.detection.lift}}},
              {"corrupted", report.corrupted},
              {"flagged", report.flagged},
              {"train_size", report.train_size}};
}

std::vector<Json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<Json> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    const bool complete = nl != std::string::npos;
    std::string line =
        text.substr(start, complete ? nl - start : std::string::npos);
    start = complete ? nl + 1 : text.size();
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      if (!complete) break;  // torn final append
      throw RecordError(path + ": " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const std::vector<Json>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& r : rows) out << r.dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("failed to write " + path);
}

std::vector<GapRecord> read_gap_records(const std::string& path,
                                        const TagSet& ts) {
  std::vector<GapRecord> out;
  for (const auto& j : read_jsonl(path)) out.push_back(gap_record_from_json(j, ts));
  return out;
}

void write_gap_records(const std::vector<GapRecord>& records,
                       const std::string& path, const TagSet& ts) {
  std::vector<Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r, ts));
  write_jsonl(rows, path);
}

std::vector<ReviewDecision> read_decisions(const std::string& path,
                                           const TagSet& ts) {
  std::vector<ReviewDecision> out;
  for (const auto& j : read_jsonl(path)) out.push_back(decision_from_json(j, ts));
  return out;
}

void write_fold_plan(const FoldPlan& plan, const std::string& path) {
  std::vector<Json> rows;
  for (const auto& [id, fold] : plan.assignment) {
    rows.push_back(Json{{"utterance_id", id}, {"fold", fold}});
  }
  write_jsonl(rows, path);
}

void write_ledger(const CorruptionLedger& ledger, const std::string& path,
                  const TagSet& ts) {
  std::vector<Json> rows;
  for (const auto& [id, e] : ledger.entries) {
    rows.push_back(Json{{"utterance_id", id},
                        {"original_tags", label_names(e.original_tags, ts)},
                        {"corrupted_tags", label_names(e.corrupted_tags, ts)},
                        {"rule", e.rule}});
  }
  write_jsonl(rows, path);
}

CorruptionLedger read_ledger(const std::string& path, const TagSet& ts) {
  CorruptionLedger ledger;
  for (const auto& j : read_jsonl(path)) {
    guarded([&] {
      ledger.entries[j.at("utterance_id").get<std::string>()] = LedgerEntry{
          labels_from(j.at("original_tags"), ts),
          labels_from(j.at("corrupted_tags"), ts),
          j.at("rule").get<std::string>()};
      return 0;
    });
  }
  return ledger;
}

}  // namespace relabel
