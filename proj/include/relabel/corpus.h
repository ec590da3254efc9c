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

// Data model and CoNLL I/O for BIO-tagged corpora.

#ifndef RELABEL_CORPUS_H_
#define RELABEL_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace relabel {

// Index into TagSet::labels(). Index 0 is always "O".
using Label = std::uint16_t;
inline constexpr Label kOutside = 0;

// Ordered entity types plus the derived BIO label list
// {O, B-T1, I-T1, B-T2, I-T2, ...}.
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(std::vector<std::string> entity_types);

  // PER, PROD, ORG, GPE.
  static TagSet Default();

  const std::vector<std::string>& entity_types() const { return types_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  std::optional<Label> find(std::string_view label) const;
  std::optional<std::size_t> find_type(std::string_view type) const;
  const std::string& name(Label label) const { return labels_.at(label); }

  bool is_begin(Label l) const { return l != kOutside && (l % 2) == 1; }
  bool is_inside(Label l) const { return l != kOutside && (l % 2) == 0; }
  // Entity type index of a B-/I- label. Undefined for O.
  std::size_t type_of(Label l) const { return (l - 1) / 2; }
  const std::string& type_name(Label l) const { return types_[type_of(l)]; }
  Label begin_label(std::size_t type) const { return static_cast<Label>(2 * type + 1); }
  Label inside_label(std::size_t type) const { return static_cast<Label>(2 * type + 2); }

  // True when `to` may follow `from` in a BIO sequence. `from` = nullopt
  // stands for the sequence start.
  bool allowed(std::optional<Label> from, Label to) const;

  bool operator==(const TagSet& o) const { return types_ == o.types_; }

 private:
  std::vector<std::string> types_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Label> index_;
};

enum class Source { kOriginal, kReannotated, kPseudoLabeled };
enum class Split { kTrain, kDev, kTest, kUnlabeled };

std::string_view to_string(Source s);
std::string_view to_string(Split s);

struct Utterance {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<Label> gold_tags;
  std::uint32_t revision = 0;
  Source source = Source::kOriginal;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Utterance&) const = default;
};

struct EntitySpan {
  std::string entity_type;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive

  auto operator<=>(const EntitySpan&) const = default;
};

struct Corpus {
  TagSet tag_set;
  std::vector<Utterance> utterances;
  Split split = Split::kTrain;

  std::size_t size() const { return utterances.size(); }
  bool empty() const { return utterances.empty(); }
  // Position of the utterance with the given id, or nullopt.
  std::optional<std::size_t> find(std::string_view id) const;
};

// Parse and validation failures carry a 1-based line number (0 when the
// failure is not tied to a line).
class CorpusError : public std::runtime_error {
 public:
  enum class Kind {
    kUnknownLabel,
    kRaggedLine,
    kEmptyCorpus,
    kBioViolation,
    kDuplicateId,
    kInvalidToken
  };

  CorpusError(Kind kind, std::size_t line, const std::string& what);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  // Token position inside the utterance for kBioViolation.
  std::size_t position() const { return position_; }
  void set_position(std::size_t p) { position_ = p; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t position_ = 0;
};

enum class BioMode { kStrict, kRepair };

// Strict: throws CorpusError(kBioViolation) at the first I-X that does not
// continue an X entity. Repair: rewrites every such I-X to B-X.
Utterance validate_bio(const Utterance& utterance, const TagSet& tag_set,
                       BioMode mode);
// Repairs in place; returns the number of rewritten tags.
std::size_t repair_bio(std::span<Label> tags, const TagSet& tag_set);
// Position of the first BIO violation, if any.
std::optional<std::size_t> first_bio_violation(std::span<const Label> tags,
                                               const TagSet& tag_set);

// Maximal B-X I-X* runs. Expects a BIO-valid sequence.
std::vector<EntitySpan> extract_spans(std::span<const Label> tags,
                                      const TagSet& tag_set);
inline std::vector<EntitySpan> extract_spans(const Utterance& u,
                                             const TagSet& tag_set) {
  return extract_spans(u.gold_tags, tag_set);
}
// Inverse of extract_spans for a sequence of length n.
std::vector<Label> render_spans(std::span<const EntitySpan> spans,
                                std::size_t n, const TagSet& tag_set);

struct ParseOptions {
  BioMode mode = BioMode::kRepair;
  Split split = Split::kTrain;
};

// Two-column CoNLL: "token<TAB or SPACE>tag", blank line between utterances,
// optional "# id = <id>" line before a block.
Corpus parse_conll(std::istream& in, const TagSet& tag_set,
                   const ParseOptions& options = {});
Corpus parse_conll(std::string_view text, const TagSet& tag_set,
                   const ParseOptions& options = {});
Corpus read_conll_file(const std::string& path, const TagSet& tag_set,
                       const ParseOptions& options = {});

// Tab-separated output with "# id = " comments. Throws std::runtime_error
// when the stream fails.
void write_conll(const Corpus& corpus, std::ostream& out);
std::string to_conll(const Corpus& corpus);
void write_conll_file(const Corpus& corpus, const std::string& path);

// Label names for a tag sequence, and the reverse. The reverse throws
// CorpusError(kUnknownLabel).
std::vector<std::string> label_names(std::span<const Label> tags,
                                     const TagSet& tag_set);
std::vector<Label> parse_labels(std::span<const std::string> names,
                                const TagSet& tag_set);

// Copy of `corpus` with every tag set to O and split = unlabeled.
Corpus strip_labels(const Corpus& corpus);

}  // namespace relabel

#endif  // RELABEL_CORPUS_H_
