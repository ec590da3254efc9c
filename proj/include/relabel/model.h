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

// Weights of the linear-chain CRF tagger and inference over utterances.
//
// Emission weights are stored sparsely: each feature id seen in training owns
// one row of |labels| weights. Features without a row score zero. Transitions
// into I-X from anything but B-X/I-X (and from the sequence start) are fixed
// at -inf, so decoded sequences are always BIO-valid.
//
// Serialized form (text, one item per line, doubles printed with 17
// significant digits, "-inf" for forbidden entries):
//
//   relabel-crf 1
//   capacity <teacher|student>
//   hash_bits <bits>
//   types <T1> <T2> ...
//   start <L values>
//   transition
//   <L lines of L values>
//   emission <count>
//   <feature id> <label index> <weight>      (sorted, zero weights omitted)

#ifndef RELABEL_MODEL_H_
#define RELABEL_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "relabel/corpus.h"
#include "relabel/features.h"
#include "relabel/lattice.h"

namespace relabel {

class ModelWeights {
 public:
  ModelWeights() = default;
  ModelWeights(TagSet tag_set, Capacity capacity,
               unsigned hash_bits = kDefaultHashBits);

  const TagSet& tag_set() const { return tag_set_; }
  Capacity capacity() const { return capacity_; }
  unsigned hash_bits() const { return hash_bits_; }
  std::size_t num_labels() const { return tag_set_.size(); }

  std::size_t num_rows() const { return row_features_.size(); }
  std::optional<std::uint32_t> row(FeatureId feature) const;
  // Returns the existing row or appends a zero row.
  std::uint32_t add_row(FeatureId feature);
  FeatureId row_feature(std::uint32_t row) const { return row_features_[row]; }

  std::span<double> emission_row(std::uint32_t row) {
    return {&emission_[row * num_labels()], num_labels()};
  }
  std::span<const double> emission_row(std::uint32_t row) const {
    return {&emission_[row * num_labels()], num_labels()};
  }
  // Weight of (feature, label); zero when the feature has no row.
  double emission(FeatureId feature, Label label) const;

  Matrix& transition() { return transition_; }
  const Matrix& transition() const { return transition_; }
  std::vector<double>& start() { return start_; }
  const std::vector<double>& start() const { return start_; }

  // Feature vectors for every position, at this model's capacity.
  std::vector<FeatureVector> features(std::span<const std::string> tokens) const;
  // Per-position row lists; features without rows are dropped.
  std::vector<std::vector<std::uint32_t>> rows_for(
      std::span<const FeatureVector> features) const;
  Lattice lattice(std::span<const std::vector<std::uint32_t>> rows) const;
  Lattice lattice(std::span<const std::string> tokens) const;

  // True when every allowed weight is finite.
  bool finite() const;

  void save(std::ostream& out) const;
  std::string serialize() const;
  static ModelWeights load(std::istream& in);
  static ModelWeights deserialize(const std::string& text);
  void save_file(const std::string& path) const;
  static ModelWeights load_file(const std::string& path);

  // 16 hex digits of FNV-1a over the serialized form.
  std::string fingerprint() const;

 private:
  TagSet tag_set_;
  Capacity capacity_ = Capacity::kTeacher;
  unsigned hash_bits_ = kDefaultHashBits;
  std::unordered_map<FeatureId, std::uint32_t> rows_;
  std::vector<FeatureId> row_features_;
  std::vector<double> emission_;
  Matrix transition_;
  std::vector<double> start_;
};

struct Decoded {
  std::vector<Label> tags;
  double path_score = kNegInf;
};

// Most probable tag sequence.
Decoded viterbi_decode(const ModelWeights& weights,
                       std::span<const std::string> tokens);
inline Decoded viterbi_decode(const ModelWeights& weights, const Utterance& u) {
  return viterbi_decode(weights, u.tokens);
}

// n x |labels| posterior marginals; rows sum to one.
Matrix token_marginals(const ModelWeights& weights, const Utterance& u);
// Natural log of token_marginals; -inf for forbidden cells.
Matrix token_log_scores(const ModelWeights& weights, const Utterance& u);

// Decodes every utterance; tags are replaced, everything else is kept.
Corpus predict_corpus(const ModelWeights& weights, const Corpus& corpus);

}  // namespace relabel

#endif  // RELABEL_MODEL_H_
