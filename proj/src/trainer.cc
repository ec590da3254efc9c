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

#include "relabel/trainer.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "relabel/rng.h"

namespace relabel {

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be > 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw std::invalid_argument("l2 must be non-negative");
  }
  if (max_sequence_length <= 0) {
    throw std::invalid_argument("max_sequence_length must be > 0");
  }
}

Gradient::Gradient(const ModelWeights& w)
    : emission(w.num_rows() * w.num_labels(), 0.0),
      transition(w.num_labels(), w.num_labels(), 0.0),
      start(w.num_labels(), 0.0) {}

void Gradient::clear() {
  std::fill(emission.begin(), emission.end(), 0.0);
  transition = Matrix(transition.rows(), transition.cols(), 0.0);
  std::fill(start.begin(), start.end(), 0.0);
}

double log_likelihood(const ModelWeights& weights,
                      std::span<const std::vector<std::uint32_t>> rows,
                      std::span<const Label> gold, Gradient* grad) {
  const Lattice lat = weights.lattice(rows);
  const std::size_t n = lat.length();
  const std::size_t num = lat.labels();
  if (n == 0) return 0.0;
  const ForwardBackward fb = forward_backward(lat);
  const double ll = lat.path_score(gold) - fb.log_z;
  if (!grad) return ll;

  // Observed counts.
  grad->start[gold[0]] += 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t r : rows[i]) grad->emission[r * num + gold[i]] += 1.0;
    if (i > 0) grad->transition(gold[i - 1], gold[i]) += 1.0;
  }

  // Expected counts.
  std::vector<double> marg(num);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t y = 0; y < num; ++y) {
      marg[y] = std::exp(fb.log_marginal(i, y));
    }
    if (i == 0) {
      for (std::size_t y = 0; y < num; ++y) grad->start[y] -= marg[y];
    }
    for (std::uint32_t r : rows[i]) {
      double* g = &grad->emission[r * num];
      for (std::size_t y = 0; y < num; ++y) g[y] -= marg[y];
    }
    if (i == 0) continue;
    for (std::size_t a = 0; a < num; ++a) {
      const double alpha = fb.alpha(i - 1, a);
      if (alpha == kNegInf) continue;
      for (std::size_t b = 0; b < num; ++b) {
        const double t = lat.transition(a, b);
        if (t == kNegInf) continue;
        const double lp =
            alpha + t + lat.emission(i, b) + fb.beta(i, b) - fb.log_z;
        grad->transition(a, b) -= std::exp(lp);
      }
    }
  }
  return ll;
}

namespace {

struct Instance {
  std::vector<std::vector<std::uint32_t>> rows;
  std::vector<Label> gold;
};

double squared_norm(const ModelWeights& w) {
  double s = 0.0;
  for (std::uint32_t r = 0; r < w.num_rows(); ++r) {
    for (double v : w.emission_row(r)) s += v * v;
  }
  for (std::size_t a = 0; a < w.num_labels(); ++a) {
    if (w.start()[a] != kNegInf) s += w.start()[a] * w.start()[a];
    for (std::size_t b = 0; b < w.num_labels(); ++b) {
      const double t = w.transition()(a, b);
      if (t != kNegInf) s += t * t;
    }
  }
  return s;
}

// Truncates to the configured length; returns true when it did.
bool clip(std::vector<std::string>& tokens, std::vector<Label>& tags,
          int max_len, const TagSet& ts) {
  if (tokens.size() <= static_cast<std::size_t>(max_len)) return false;
  tokens.resize(max_len);
  tags.resize(max_len);
  repair_bio(tags, ts);
  return true;
}

// AdaGrad step on one coordinate; forbidden entries stay at -inf.
inline void step(double& w, double g, double& acc, double lr) {
  if (g == 0.0 || w == kNegInf) return;
  acc += g * g;
  w += lr * g / std::sqrt(acc);
}

}  // namespace

double corpus_loss(const ModelWeights& weights, const Corpus& corpus,
                   double l2, int max_sequence_length) {
  if (corpus.empty()) return 0.0;
  double nll = 0.0;
  for (const auto& u : corpus.utterances) {
    auto tokens = u.tokens;
    auto tags = u.gold_tags;
    clip(tokens, tags, max_sequence_length, weights.tag_set());
    auto feats = weights.features(tokens);
    auto rows = weights.rows_for(feats);
    nll -= log_likelihood(weights, rows, tags, nullptr);
  }
  nll += 0.5 * l2 * squared_norm(weights);
  return nll / static_cast<double>(corpus.size());
}

TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  Capacity capacity, const ModelWeights* init) {
  config.validate();
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");

  TrainResult result{init ? *init : ModelWeights(corpus.tag_set, capacity), {}, 0};
  ModelWeights& w = result.weights;
  if (!(w.tag_set() == corpus.tag_set) || w.capacity() != capacity) {
    throw std::invalid_argument(
        "initial weights do not match corpus tag set or capacity");
  }

  // Feature rows are registered in corpus order so that row layout, and
  // hence floating-point summation order, is a function of the corpus.
  std::vector<Instance> data;
  data.reserve(corpus.size());
  for (const auto& u : corpus.utterances) {
    auto tokens = u.tokens;
    Instance inst{{}, u.gold_tags};
    if (clip(tokens, inst.gold, config.max_sequence_length, w.tag_set())) {
      ++result.truncated;
    }
    auto feats = w.features(tokens);
    for (const auto& fv : feats) {
      for (FeatureId f : fv) w.add_row(f);
    }
    inst.rows = w.rows_for(feats);
    data.push_back(std::move(inst));
  }
  if (result.truncated) {
    std::cerr << "warning: truncated " << result.truncated
              << " utterance(s) longer than " << config.max_sequence_length
              << " tokens\n";
  }

  const std::size_t num = w.num_labels();
  const double n_total = static_cast<double>(data.size());
  Gradient grad(w);
  std::vector<double> acc_emission(grad.emission.size(), 0.0);
  Matrix acc_transition(num, num, 0.0);
  std::vector<double> acc_start(num, 0.0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<char> touched(w.num_rows(), 0);
  std::vector<std::uint32_t> touched_rows;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(config.seed, static_cast<std::uint64_t>(epoch));
    rng.shuffle(std::span<std::size_t>(order));

    for (std::size_t begin = 0; begin < order.size();
         begin += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      touched_rows.clear();
      for (std::size_t k = begin; k < end; ++k) {
        const Instance& inst = data[order[k]];
        for (const auto& rs : inst.rows) {
          for (std::uint32_t r : rs) {
            if (!touched[r]) {
              touched[r] = 1;
              touched_rows.push_back(r);
            }
          }
        }
        log_likelihood(w, inst.rows, inst.gold, &grad);
      }
      std::sort(touched_rows.begin(), touched_rows.end());

      // The regularizer's share for this batch is applied to the rows the
      // batch touched and to the dense transition parameters.
      const double decay = config.l2 * static_cast<double>(end - begin) / n_total;
      const double lr = config.learning_rate;
      for (std::uint32_t r : touched_rows) {
        auto row = w.emission_row(r);
        for (std::size_t y = 0; y < num; ++y) {
          const std::size_t idx = r * num + y;
          step(row[y], grad.emission[idx] - decay * row[y], acc_emission[idx],
               lr);
          grad.emission[idx] = 0.0;
        }
        touched[r] = 0;
      }
      for (std::size_t a = 0; a < num; ++a) {
        step(w.start()[a], grad.start[a] - decay * w.start()[a], acc_start[a],
             lr);
        grad.start[a] = 0.0;
        for (std::size_t b = 0; b < num; ++b) {
          double& t = w.transition()(a, b);
          step(t, grad.transition(a, b) - decay * t, acc_transition(a, b), lr);
          grad.transition(a, b) = 0.0;
        }
      }
    }

    double nll = 0.0;
    for (const auto& inst : data) {
      nll -= log_likelihood(w, inst.rows, inst.gold, nullptr);
    }
    nll = (nll + 0.5 * config.l2 * squared_norm(w)) / n_total;
    if (!std::isfinite(nll) || !w.finite()) {
      throw NonFiniteLoss("training diverged at epoch " +
                          std::to_string(epoch + 1) +
                          "; lower the learning rate");
    }
    result.epoch_loss.push_back(nll);
  }
  return result;
}

}  // namespace relabel
