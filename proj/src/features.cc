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

#include "relabel/features.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace relabel {

std::string_view to_string(Capacity c) {
  return c == Capacity::kTeacher ? "teacher" : "student";
}

Capacity parse_capacity(std::string_view name) {
  if (name == "teacher") return Capacity::kTeacher;
  if (name == "student") return Capacity::kStudent;
  throw std::invalid_argument("unknown capacity '" + std::string(name) + "'");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string word_shape(std::string_view word) {
  std::string shape;
  for (unsigned char c : word) {
    char cls;
    if (std::isupper(c)) {
      cls = 'X';
    } else if (std::islower(c)) {
      cls = 'x';
    } else if (std::isdigit(c)) {
      cls = 'd';
    } else {
      cls = static_cast<char>(c);
    }
    if (shape.empty() || shape.back() != cls) shape.push_back(cls);
  }
  return shape;
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::vector<std::string> feature_strings(std::span<const std::string> tokens,
                                         std::size_t position,
                                         Capacity capacity) {
  if (position >= tokens.size()) {
    throw std::out_of_range("feature position past end of utterance");
  }
  const bool teacher = capacity == Capacity::kTeacher;
  const std::string& w = tokens[position];
  std::vector<std::string> f;
  f.reserve(16);
  f.push_back("bias");
  f.push_back("word=" + w);
  f.push_back("lower=" + lowercase(w));
  const std::size_t max_affix = teacher ? 3 : 2;
  for (std::size_t k = 1; k <= max_affix && k <= w.size(); ++k) {
    f.push_back("prefix" + std::to_string(k) + "=" + w.substr(0, k));
    f.push_back("suffix" + std::to_string(k) + "=" + w.substr(w.size() - k));
  }
  f.push_back("shape=" + word_shape(w));
  if (position == 0) f.push_back("first");
  if (position + 1 == tokens.size()) f.push_back("last");

  const std::size_t window = teacher ? 2 : 1;
  for (std::size_t d = 1; d <= window; ++d) {
    if (position >= d) {
      f.push_back("prev_" + std::to_string(d) + "=" + tokens[position - d]);
    }
    if (position + d < tokens.size()) {
      f.push_back("next_" + std::to_string(d) + "=" + tokens[position + d]);
    }
  }
  return f;
}

FeatureVector extract_features(std::span<const std::string> tokens,
                               std::size_t position, Capacity capacity,
                               unsigned hash_bits) {
  const std::uint64_t mask = (std::uint64_t{1} << hash_bits) - 1;
  FeatureVector ids;
  for (const auto& s : feature_strings(tokens, position, capacity)) {
    ids.push_back(static_cast<FeatureId>(fnv1a64(s) & mask));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace relabel
