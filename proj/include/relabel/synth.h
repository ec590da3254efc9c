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

// Templated business-call utterances with gazetteer fillers, used as a
// stand-in corpus when no annotated data is at hand.

#ifndef RELABEL_SYNTH_H_
#define RELABEL_SYNTH_H_

#include <cstdint>
#include <string>

#include "relabel/corpus.h"

namespace relabel {

struct SynthConfig {
  std::size_t utterances = 2000;
  std::uint64_t seed = 0;
  // Fraction of utterances rendered fully lowercase (ASR output has only
  // partial casing).
  double lowercase_prob = 0.3;
  // Per-utterance chance of a filled pause ("um", "uh", ...) being inserted.
  double filler_prob = 0.3;
  // Ids are id_prefix + sequence number.
  std::string id_prefix = "s";
  Split split = Split::kTrain;
};

// Uses TagSet::Default(). Deterministic in the config.
Corpus generate_corpus(const SynthConfig& config);

}  // namespace relabel

#endif  // RELABEL_SYNTH_H_
