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

// Seeded randomness with a fully specified output sequence. The standard
// distributions are implementation-defined, so everything that must be
// reproducible across toolchains draws through this wrapper.

#ifndef RELABEL_RNG_H_
#define RELABEL_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace relabel {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Seed derived from a base seed and a stream tag.
  Rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1))) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [0, 1) with 53 bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace relabel

#endif  // RELABEL_RNG_H_
