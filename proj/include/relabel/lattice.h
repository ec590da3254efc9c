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

// Linear-chain score lattice and the exact inference routines over it:
// Viterbi decoding and log-space forward-backward.

#ifndef RELABEL_LATTICE_H_
#define RELABEL_LATTICE_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace relabel {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Row-major n x cols matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<double> row(std::size_t r) { return {&data_[r * cols_], cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {&data_[r * cols_], cols_};
  }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Scores of one sequence: emission(i, y) for token i and label y,
// transition(a, b) for label a followed by b, start(y) for the first label.
// -inf entries are structurally forbidden.
struct Lattice {
  Matrix emission;    // n x L
  Matrix transition;  // L x L
  std::vector<double> start;  // L

  std::size_t length() const { return emission.rows(); }
  std::size_t labels() const { return emission.cols(); }
  // Unnormalized log-score of a complete path.
  double path_score(std::span<const std::uint16_t> path) const;
};

struct ViterbiResult {
  std::vector<std::uint16_t> tags;
  double score = kNegInf;
};

// Ties go to the lower label index.
ViterbiResult viterbi(const Lattice& lattice);

// Forward (alpha) and backward (beta) log-messages plus log Z.
struct ForwardBackward {
  Matrix alpha;
  Matrix beta;
  double log_z = kNegInf;

  // log P(y_i = y).
  double log_marginal(std::size_t i, std::size_t y) const;
};

ForwardBackward forward_backward(const Lattice& lattice);
double log_partition(const Lattice& lattice);

// n x L log-marginals; -inf where the probability is exactly zero.
Matrix log_marginals(const Lattice& lattice);
Matrix log_marginals(const ForwardBackward& fb);
// n x L marginals; exp of log_marginals, so forbidden cells are exactly 0.
Matrix marginals(const Lattice& lattice);

double log_sum_exp(std::span<const double> values);

}  // namespace relabel

#endif  // RELABEL_LATTICE_H_
