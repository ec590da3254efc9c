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

#include "relabel/model.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace relabel {

namespace {

constexpr std::string_view kMagic = "relabel-crf";
constexpr int kFormatVersion = 1;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("model file: bad number '" + s + "'");
  }
  return v;
}

void expect_word(std::istream& in, std::string_view word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw std::runtime_error("model file: expected '" + std::string(word) +
                             "', found '" + got + "'");
  }
}

std::string read_word(std::istream& in) {
  std::string w;
  if (!(in >> w)) throw std::runtime_error("model file: truncated");
  return w;
}

}  // namespace

ModelWeights::ModelWeights(TagSet tag_set, Capacity capacity,
                           unsigned hash_bits)
    : tag_set_(std::move(tag_set)),
      capacity_(capacity),
      hash_bits_(hash_bits),
      transition_(tag_set_.size(), tag_set_.size(), 0.0),
      start_(tag_set_.size(), 0.0) {
  if (hash_bits_ == 0 || hash_bits_ > 31) {
    throw std::invalid_argument("hash_bits must be in [1, 31]");
  }
  const std::size_t num = tag_set_.size();
  for (std::size_t to = 0; to < num; ++to) {
    const Label t = static_cast<Label>(to);
    if (!tag_set_.allowed(std::nullopt, t)) start_[to] = kNegInf;
    for (std::size_t from = 0; from < num; ++from) {
      if (!tag_set_.allowed(static_cast<Label>(from), t)) {
        transition_(from, to) = kNegInf;
      }
    }
  }
}

std::optional<std::uint32_t> ModelWeights::row(FeatureId feature) const {
  auto it = rows_.find(feature);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t ModelWeights::add_row(FeatureId feature) {
  auto [it, inserted] =
      rows_.emplace(feature, static_cast<std::uint32_t>(row_features_.size()));
  if (inserted) {
    row_features_.push_back(feature);
    emission_.resize(emission_.size() + num_labels(), 0.0);
  }
  return it->second;
}

double ModelWeights::emission(FeatureId feature, Label label) const {
  auto r = row(feature);
  return r ? emission_row(*r)[label] : 0.0;
}

std::vector<FeatureVector> ModelWeights::features(
    std::span<const std::string> tokens) const {
  std::vector<FeatureVector> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.push_back(extract_features(tokens, i, capacity_, hash_bits_));
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> ModelWeights::rows_for(
    std::span<const FeatureVector> features) const {
  std::vector<std::vector<std::uint32_t>> out(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (FeatureId f : features[i]) {
      if (auto r = row(f)) out[i].push_back(*r);
    }
  }
  return out;
}

Lattice ModelWeights::lattice(
    std::span<const std::vector<std::uint32_t>> rows) const {
  const std::size_t num = num_labels();
  Lattice lat;
  lat.emission = Matrix(rows.size(), num, 0.0);
  lat.transition = transition_;
  lat.start = start_;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto out = lat.emission.row(i);
    for (std::uint32_t r : rows[i]) {
      const double* w = &emission_[r * num];
      for (std::size_t y = 0; y < num; ++y) out[y] += w[y];
    }
  }
  return lat;
}

Lattice ModelWeights::lattice(std::span<const std::string> tokens) const {
  auto feats = features(tokens);
  auto rows = rows_for(feats);
  return lattice(rows);
}

bool ModelWeights::finite() const {
  for (double w : emission_) {
    if (!std::isfinite(w)) return false;
  }
  const std::size_t num = num_labels();
  for (std::size_t to = 0; to < num; ++to) {
    if (start_[to] != kNegInf && !std::isfinite(start_[to])) return false;
    for (std::size_t from = 0; from < num; ++from) {
      const double t = transition_(from, to);
      if (t != kNegInf && !std::isfinite(t)) return false;
    }
  }
  return true;
}

void ModelWeights::save(std::ostream& out) const {
  const std::size_t num = num_labels();
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "capacity " << to_string(capacity_) << '\n';
  out << "hash_bits " << hash_bits_ << '\n';
  out << "types";
  for (const auto& t : tag_set_.entity_types()) out << ' ' << t;
  out << '\n';
  out << "start";
  for (double s : start_) out << ' ' << format_double(s);
  out << '\n';
  out << "transition\n";
  for (std::size_t from = 0; from < num; ++from) {
    for (std::size_t to = 0; to < num; ++to) {
      if (to) out << ' ';
      out << format_double(transition_(from, to));
    }
    out << '\n';
  }

  std::vector<std::tuple<FeatureId, std::size_t, double>> triples;
  for (std::uint32_t r = 0; r < num_rows(); ++r) {
    auto w = emission_row(r);
    for (std::size_t y = 0; y < num; ++y) {
      if (w[y] != 0.0) triples.emplace_back(row_features_[r], y, w[y]);
    }
  }
  std::sort(triples.begin(), triples.end());
  out << "emission " << triples.size() << '\n';
  for (const auto& [f, y, w] : triples) {
    out << f << ' ' << y << ' ' << format_double(w) << '\n';
  }
  if (!out) throw std::runtime_error("failed to write model");
}

std::string ModelWeights::serialize() const {
  std::ostringstream out;
  save(out);
  return out.str();
}

ModelWeights ModelWeights::load(std::istream& in) {
  expect_word(in, kMagic);
  if (read_word(in) != std::to_string(kFormatVersion)) {
    throw std::runtime_error("model file: unsupported version");
  }
  expect_word(in, "capacity");
  const Capacity capacity = parse_capacity(read_word(in));
  expect_word(in, "hash_bits");
  const unsigned bits = static_cast<unsigned>(std::stoul(read_word(in)));

  expect_word(in, "types");
  std::string line;
  std::getline(in, line);
  std::istringstream types_in(line);
  std::vector<std::string> types;
  for (std::string t; types_in >> t;) types.push_back(t);

  ModelWeights m(TagSet(std::move(types)), capacity, bits);
  const std::size_t num = m.num_labels();
  expect_word(in, "start");
  for (std::size_t y = 0; y < num; ++y) m.start_[y] = parse_double(read_word(in));
  expect_word(in, "transition");
  for (std::size_t from = 0; from < num; ++from) {
    for (std::size_t to = 0; to < num; ++to) {
      m.transition_(from, to) = parse_double(read_word(in));
    }
  }
  expect_word(in, "emission");
  const std::size_t count = std::stoull(read_word(in));
  for (std::size_t k = 0; k < count; ++k) {
    const auto f = static_cast<FeatureId>(std::stoul(read_word(in)));
    const std::size_t y = std::stoul(read_word(in));
    const double w = parse_double(read_word(in));
    if (y >= num) throw std::runtime_error("model file: label out of range");
    m.emission_row(m.add_row(f))[y] = w;
  }
  return m;
}

ModelWeights ModelWeights::deserialize(const std::string& text) {
  std::istringstream in(text);
  return load(in);
}

void ModelWeights::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save(out);
}

ModelWeights ModelWeights::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

std::string ModelWeights::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize())));
  return buf;
}

Decoded viterbi_decode(const ModelWeights& weights,
                       std::span<const std::string> tokens) {
  auto v = viterbi(weights.lattice(tokens));
  return {std::move(v.tags), v.score};
}

Matrix token_marginals(const ModelWeights& weights, const Utterance& u) {
  return marginals(weights.lattice(u.tokens));
}

Matrix token_log_scores(const ModelWeights& weights, const Utterance& u) {
  return log_marginals(weights.lattice(u.tokens));
}

Corpus predict_corpus(const ModelWeights& weights, const Corpus& corpus) {
  Corpus out = corpus;
  out.tag_set = weights.tag_set();
  for (auto& u : out.utterances) u.gold_tags = viterbi_decode(weights, u).tags;
  return out;
}

}  // namespace relabel
