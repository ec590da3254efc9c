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

// Maximum-likelihood training of the CRF tagger.

#ifndef RELABEL_TRAINER_H_
#define RELABEL_TRAINER_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "relabel/corpus.h"
#include "relabel/model.h"

namespace relabel {

struct TrainConfig {
  int epochs = 5;
  int batch_size = 64;
  // Base step size of the per-coordinate adaptive update. Transformer
  // fine-tuning uses 1e-4; that scale is far too small for a CRF.
  double learning_rate = 0.1;
  // Coefficient of 0.5 * l2 * ||w||^2 on the corpus objective.
  double l2 = 1e-3;
  int max_sequence_length = 200;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter-shaped buffer aligned with a ModelWeights' rows.
struct Gradient {
  std::vector<double> emission;  // rows x labels
  Matrix transition;
  std::vector<double> start;

  explicit Gradient(const ModelWeights& w);
  void clear();
};

// Log-likelihood of `gold` given the per-position row lists, and when
// `grad` is non-null adds (observed - expected) feature counts into it.
double log_likelihood(const ModelWeights& weights,
                      std::span<const std::vector<std::uint32_t>> rows,
                      std::span<const Label> gold, Gradient* grad);

struct TrainResult {
  ModelWeights weights;
  // Regularized negative log-likelihood per utterance, after each epoch.
  std::vector<double> epoch_loss;
  std::size_t truncated = 0;
};

// Mini-batch gradient ascent on the L2-regularized conditional
// log-likelihood. When `init` is given, training continues from those
// weights (which must share the tag set and capacity).
TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  Capacity capacity, const ModelWeights* init = nullptr);

// Regularized negative log-likelihood per utterance.
double corpus_loss(const ModelWeights& weights, const Corpus& corpus,
                   double l2, int max_sequence_length = 200);

}  // namespace relabel

#endif  // RELABEL_TRAINER_H_
