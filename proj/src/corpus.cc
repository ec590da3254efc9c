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

#include "relabel/corpus.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace relabel {

TagSet::TagSet(std::vector<std::string> entity_types)
    : types_(std::move(entity_types)) {
  labels_.reserve(2 * types_.size() + 1);
  labels_.push_back("O");
  for (const auto& t : types_) {
    if (t.empty() || t == "O") {
      throw std::invalid_argument("invalid entity type '" + t + "'");
    }
    labels_.push_back("B-" + t);
    labels_.push_back("I-" + t);
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], static_cast<Label>(i)).second) {
      throw std::invalid_argument("duplicate entity type in tag set");
    }
  }
}

TagSet TagSet::Default() { return TagSet({"PER", "PROD", "ORG", "GPE"}); }

std::optional<Label> TagSet::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TagSet::find_type(std::string_view type) const {
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (types_[i] == type) return i;
  }
  return std::nullopt;
}

bool TagSet::allowed(std::optional<Label> from, Label to) const {
  if (!is_inside(to)) return true;
  if (!from || *from == kOutside) return false;
  return type_of(*from) == type_of(to);
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::kOriginal: return "original";
    case Source::kReannotated: return "reannotated";
    case Source::kPseudoLabeled: return "pseudo_labeled";
  }
  return "original";
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
    case Split::kUnlabeled: return "unlabeled";
  }
  return "train";
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    if (utterances[i].id == id) return i;
  }
  return std::nullopt;
}

CorpusError::CorpusError(Kind kind, std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                              : what),
      kind_(kind),
      line_(line) {}

std::optional<std::size_t> first_bio_violation(std::span<const Label> tags,
                                               const TagSet& tag_set) {
  std::optional<Label> prev;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (!tag_set.allowed(prev, tags[i])) return i;
    prev = tags[i];
  }
  return std::nullopt;
}

std::size_t repair_bio(std::span<Label> tags, const TagSet& tag_set) {
  std::size_t repaired = 0;
  std::optional<Label> prev;
  for (auto& tag : tags) {
    if (!tag_set.allowed(prev, tag)) {
      tag = tag_set.begin_label(tag_set.type_of(tag));
      ++repaired;
    }
    prev = tag;
  }
  return repaired;
}

Utterance validate_bio(const Utterance& utterance, const TagSet& tag_set,
                       BioMode mode) {
  Utterance out = utterance;
  if (mode == BioMode::kRepair) {
    repair_bio(out.gold_tags, tag_set);
    return out;
  }
  if (auto pos = first_bio_violation(out.gold_tags, tag_set)) {
    const Label bad = out.gold_tags[*pos];
    CorpusError err(CorpusError::Kind::kBioViolation, 0,
                    "utterance " + utterance.id + ": " + tag_set.name(bad) +
                        " at token " + std::to_string(*pos) +
                        " does not continue a " + tag_set.type_name(bad) +
                        " entity");
    err.set_position(*pos);
    throw err;
  }
  return out;
}

std::vector<EntitySpan> extract_spans(std::span<const Label> tags,
                                      const TagSet& tag_set) {
  std::vector<EntitySpan> spans;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i] == kOutside) {
      ++i;
      continue;
    }
    const std::size_t type = tag_set.type_of(tags[i]);
    const Label inside = tag_set.inside_label(type);
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j] == inside) ++j;
    spans.push_back({tag_set.entity_types()[type], i, j});
    i = j;
  }
  return spans;
}

std::vector<Label> render_spans(std::span<const EntitySpan> spans,
                                std::size_t n, const TagSet& tag_set) {
  std::vector<Label> tags(n, kOutside);
  for (const auto& s : spans) {
    auto type = tag_set.find_type(s.entity_type);
    if (!type || s.start >= s.end || s.end > n) {
      throw std::invalid_argument("span out of range or of unknown type");
    }
    tags[s.start] = tag_set.begin_label(*type);
    for (std::size_t k = s.start + 1; k < s.end; ++k) {
      tags[k] = tag_set.inside_label(*type);
    }
  }
  return tags;
}

namespace {

constexpr std::string_view kIdPrefix = "# id = ";
constexpr std::string_view kRevisionPrefix = "# revision = ";
constexpr std::string_view kSourcePrefix = "# source = ";

std::optional<Source> parse_source(std::string_view s) {
  for (Source v : {Source::kOriginal, Source::kReannotated,
                   Source::kPseudoLabeled}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Splits on one tab, or a single space when no tab is present.
std::vector<std::string_view> split_columns(std::string_view line) {
  const char sep = line.find('\t') != std::string_view::npos ? '\t' : ' ';
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    cols.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cols;
}

class ConllReader {
 public:
  ConllReader(const TagSet& tag_set, const ParseOptions& options)
      : tag_set_(tag_set), options_(options) {
    corpus_.tag_set = tag_set;
    corpus_.split = options.split;
  }

  void line(std::string_view raw) {
    ++line_no_;
    const std::string_view text = trim_cr(raw);
    if (text.empty()) {
      flush();
      return;
    }
    if (text.starts_with(kIdPrefix)) {
      if (!current_.tokens.empty()) flush();
      pending_id_ = std::string(text.substr(kIdPrefix.size()));
      return;
    }
    if (text.starts_with(kRevisionPrefix) && current_.tokens.empty()) {
      const auto v = text.substr(kRevisionPrefix.size());
      std::uint32_t rev = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), rev);
      if (ec != std::errc() || p != v.data() + v.size()) {
        throw CorpusError(CorpusError::Kind::kRaggedLine, line_no_,
                          "bad revision '" + std::string(v) + "'");
      }
      current_.revision = rev;
      return;
    }
    if (text.starts_with(kSourcePrefix) && current_.tokens.empty()) {
      auto src = parse_source(text.substr(kSourcePrefix.size()));
      if (!src) {
        throw CorpusError(CorpusError::Kind::kRaggedLine, line_no_,
                          "bad source '" + std::string(text) + "'");
      }
      current_.source = *src;
      return;
    }
    auto cols = split_columns(text);
    if (cols.size() != 2) {
      // Free-form comment lines are skipped; "# O" is still a token line.
      if (text.front() == '#') return;
      throw CorpusError(CorpusError::Kind::kRaggedLine, line_no_,
                        "expected 2 columns, found " +
                            std::to_string(cols.size()));
    }
    if (cols[0].empty() || cols[0].find(' ') != std::string_view::npos) {
      throw CorpusError(CorpusError::Kind::kInvalidToken, line_no_,
                        "token is empty or contains whitespace");
    }
    auto label = tag_set_.find(cols[1]);
    if (!label) {
      throw CorpusError(CorpusError::Kind::kUnknownLabel, line_no_,
                        "unknown label '" + std::string(cols[1]) + "'");
    }
    if (current_.tokens.empty()) first_line_ = line_no_;
    current_.tokens.emplace_back(cols[0]);
    current_.gold_tags.push_back(*label);
  }

  Corpus finish() {
    flush();
    if (corpus_.utterances.empty()) {
      throw CorpusError(CorpusError::Kind::kEmptyCorpus, 0,
                        "corpus contains no utterances");
    }
    return std::move(corpus_);
  }

 private:
  void flush() {
    if (current_.tokens.empty()) return;
    ++sequence_;
    current_.id = pending_id_ ? *pending_id_ : "u" + std::to_string(sequence_);
    pending_id_.reset();
    if (!ids_.insert(current_.id).second) {
      throw CorpusError(CorpusError::Kind::kDuplicateId, first_line_,
                        "duplicate utterance id '" + current_.id + "'");
    }
    try {
      current_ = validate_bio(current_, tag_set_, options_.mode);
    } catch (const CorpusError& e) {
      CorpusError positioned(CorpusError::Kind::kBioViolation,
                             first_line_ + e.position(), e.what());
      positioned.set_position(e.position());
      throw positioned;
    }
    if (options_.split == Split::kUnlabeled) {
      std::fill(current_.gold_tags.begin(), current_.gold_tags.end(),
                kOutside);
    }
    corpus_.utterances.push_back(std::move(current_));
    current_ = Utterance{};
  }

  const TagSet& tag_set_;
  ParseOptions options_;
  Corpus corpus_;
  Utterance current_;
  std::optional<std::string> pending_id_;
  std::unordered_set<std::string> ids_;
  std::size_t line_no_ = 0;
  std::size_t first_line_ = 0;
  std::size_t sequence_ = 0;
};

}  // namespace

Corpus parse_conll(std::istream& in, const TagSet& tag_set,
                   const ParseOptions& options) {
  ConllReader reader(tag_set, options);
  std::string line;
  while (std::getline(in, line)) reader.line(line);
  return reader.finish();
}

Corpus parse_conll(std::string_view text, const TagSet& tag_set,
                   const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return parse_conll(in, tag_set, options);
}

Corpus read_conll_file(const std::string& path, const TagSet& tag_set,
                       const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_conll(in, tag_set, options);
}

void write_conll(const Corpus& corpus, std::ostream& out) {
  const TagSet& ts = corpus.tag_set;
  for (const auto& u : corpus.utterances) {
    out << kIdPrefix << u.id << '\n';
    // Provenance lines appear only once an utterance has been touched.
    if (u.revision != 0) out << kRevisionPrefix << u.revision << '\n';
    if (u.source != Source::kOriginal) {
      out << kSourcePrefix << to_string(u.source) << '\n';
    }
    for (std::size_t i = 0; i < u.tokens.size(); ++i) {
      out << u.tokens[i] << '\t' << ts.name(u.gold_tags[i]) << '\n';
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed to write CoNLL output");
}

std::string to_conll(const Corpus& corpus) {
  std::ostringstream out;
  write_conll(corpus, out);
  return out.str();
}

void write_conll_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_conll(corpus, out);
  out.flush();
  if (!out) throw std::runtime_error("failed to write " + path);
}

std::vector<std::string> label_names(std::span<const Label> tags,
                                     const TagSet& tag_set) {
  std::vector<std::string> names;
  names.reserve(tags.size());
  for (Label l : tags) names.push_back(tag_set.name(l));
  return names;
}

std::vector<Label> parse_labels(std::span<const std::string> names,
                                const TagSet& tag_set) {
  std::vector<Label> tags;
  tags.reserve(names.size());
  for (const auto& n : names) {
    auto l = tag_set.find(n);
    if (!l) {
      throw CorpusError(CorpusError::Kind::kUnknownLabel, 0,
                        "unknown label '" + n + "'");
    }
    tags.push_back(*l);
  }
  return tags;
}

Corpus strip_labels(const Corpus& corpus) {
  Corpus out = corpus;
  out.split = Split::kUnlabeled;
  for (auto& u : out.utterances) {
    std::fill(u.gold_tags.begin(), u.gold_tags.end(), kOutside);
  }
  return out;
}

}  // namespace relabel
