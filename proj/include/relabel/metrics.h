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

// Entity-level precision/recall/F1 with exact span and type matching.

#ifndef RELABEL_METRICS_H_
#define RELABEL_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "relabel/corpus.h"

namespace relabel {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

// Percentages in [0, 100]; 0/0 is 0.
struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static Scores from(const Counts& c);
};

struct TypeReport {
  std::string type;
  Counts counts;
  Scores scores;
};

struct EvalReport {
  std::vector<TypeReport> per_type;  // tag-set order
  Counts overall_counts;             // sum of per-type counts
  Scores overall;                    // micro-averaged

  const TypeReport& type(const std::string& name) const;
};

class MisalignedCorpora : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Utterances are matched by id; every gold id must be present in `pred`
// with the same token count, and vice versa.
EvalReport entity_f1(const Corpus& pred, const Corpus& gold);

// Tab-separated table: header "type precision recall f1 tp fp fn", one row
// per entity type, then "overall". Scores printed with 2 decimals.
void write_report(const EvalReport& report, std::ostream& out);
std::string format_report(const EvalReport& report);

}  // namespace relabel

#endif  // RELABEL_METRICS_H_
