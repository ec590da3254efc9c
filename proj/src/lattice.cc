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

#include "relabel/lattice.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relabel {

double log_sum_exp(std::span<const double> values) {
  double max = kNegInf;
  for (double v : values) max = std::max(max, v);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double Lattice::path_score(std::span<const std::uint16_t> path) const {
  if (path.size() != length()) {
    throw std::invalid_argument("path length does not match lattice");
  }
  if (path.empty()) return 0.0;
  double score = start[path[0]] + emission(0, path[0]);
  for (std::size_t i = 1; i < path.size(); ++i) {
    score += transition(path[i - 1], path[i]) + emission(i, path[i]);
  }
  return score;
}

ViterbiResult viterbi(const Lattice& lattice) {
  const std::size_t n = lattice.length();
  const std::size_t num_labels = lattice.labels();
  ViterbiResult result;
  if (n == 0) return result;

  Matrix delta(n, num_labels, kNegInf);
  std::vector<std::uint16_t> back(n * num_labels, 0);
  for (std::size_t y = 0; y < num_labels; ++y) {
    delta(0, y) = lattice.start[y] + lattice.emission(0, y);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < num_labels; ++y) {
      double best = kNegInf;
      std::uint16_t arg = 0;
      for (std::size_t p = 0; p < num_labels; ++p) {
        const double s = delta(i - 1, p) + lattice.transition(p, y);
        if (s > best) {
          best = s;
          arg = static_cast<std::uint16_t>(p);
        }
      }
      delta(i, y) = best + lattice.emission(i, y);
      back[i * num_labels + y] = arg;
    }
  }

  std::uint16_t last = 0;
  double best = kNegInf;
  for (std::size_t y = 0; y < num_labels; ++y) {
    if (delta(n - 1, y) > best) {
      best = delta(n - 1, y);
      last = static_cast<std::uint16_t>(y);
    }
  }
  result.score = best;
  result.tags.assign(n, 0);
  result.tags[n - 1] = last;
  for (std::size_t i = n - 1; i > 0; --i) {
    result.tags[i - 1] = back[i * num_labels + result.tags[i]];
  }
  return result;
}

ForwardBackward forward_backward(const Lattice& lattice) {
  const std::size_t n = lattice.length();
  const std::size_t num_labels = lattice.labels();
  ForwardBackward fb;
  fb.alpha = Matrix(n, num_labels, kNegInf);
  fb.beta = Matrix(n, num_labels, kNegInf);
  if (n == 0) {
    fb.log_z = 0.0;
    return fb;
  }

  std::vector<double> terms(num_labels);
  for (std::size_t y = 0; y < num_labels; ++y) {
    fb.alpha(0, y) = lattice.start[y] + lattice.emission(0, y);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < num_labels; ++y) {
      for (std::size_t p = 0; p < num_labels; ++p) {
        terms[p] = fb.alpha(i - 1, p) + lattice.transition(p, y);
      }
      fb.alpha(i, y) = log_sum_exp(terms) + lattice.emission(i, y);
    }
  }

  for (std::size_t y = 0; y < num_labels; ++y) fb.beta(n - 1, y) = 0.0;
  for (std::size_t i = n - 1; i > 0; --i) {
    for (std::size_t y = 0; y < num_labels; ++y) {
      for (std::size_t nx = 0; nx < num_labels; ++nx) {
        terms[nx] = lattice.transition(y, nx) + lattice.emission(i, nx) +
                    fb.beta(i, nx);
      }
      fb.beta(i - 1, y) = log_sum_exp(terms);
    }
  }

  fb.log_z = log_sum_exp(fb.alpha.row(n - 1));
  return fb;
}

double ForwardBackward::log_marginal(std::size_t i, std::size_t y) const {
  const double a = alpha(i, y);
  const double b = beta(i, y);
  if (a == kNegInf || b == kNegInf) return kNegInf;
  // Clamp rounding drift above log(1).
  return std::min(0.0, a + b - log_z);
}

double log_partition(const Lattice& lattice) {
  return forward_backward(lattice).log_z;
}

Matrix log_marginals(const ForwardBackward& fb) {
  Matrix out(fb.alpha.rows(), fb.alpha.cols(), kNegInf);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t y = 0; y < out.cols(); ++y) {
      out(i, y) = fb.log_marginal(i, y);
    }
  }
  return out;
}

Matrix log_marginals(const Lattice& lattice) {
  return log_marginals(forward_backward(lattice));
}

Matrix marginals(const Lattice& lattice) {
  Matrix logm = log_marginals(lattice);
  Matrix out(logm.rows(), logm.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t y = 0; y < out.cols(); ++y) {
      out(i, y) = std::exp(logm(i, y));
    }
  }
  return out;
}

}  // namespace relabel
