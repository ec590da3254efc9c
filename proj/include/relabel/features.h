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

// Token feature templates for the tagger. Feature strings are hashed into a
// fixed 2^hash_bits id space.

#ifndef RELABEL_FEATURES_H_
#define RELABEL_FEATURES_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relabel {

enum class Capacity { kTeacher, kStudent };

std::string_view to_string(Capacity c);
// Throws std::invalid_argument on anything but "teacher"/"student".
Capacity parse_capacity(std::string_view name);

inline constexpr unsigned kDefaultHashBits = 20;

using FeatureId = std::uint32_t;
// Sorted, duplicate-free feature ids; every id has multiplier 1.
using FeatureVector = std::vector<FeatureId>;

std::uint64_t fnv1a64(std::string_view bytes);

// Collapsed character-class pattern: "Google" -> "Xx", "A380" -> "Xd".
std::string word_shape(std::string_view word);

// Template strings for a position. Teacher: bias, word, lower, prefixes and
// suffixes of length 1-3, shape, first/last flags, neighbour words within
// +-2. Student: the same minus the distance-2 neighbours and the length-3
// affixes.
std::vector<std::string> feature_strings(std::span<const std::string> tokens,
                                         std::size_t position,
                                         Capacity capacity);

FeatureVector extract_features(std::span<const std::string> tokens,
                               std::size_t position, Capacity capacity,
                               unsigned hash_bits = kDefaultHashBits);

}  // namespace relabel

#endif  // RELABEL_FEATURES_H_
