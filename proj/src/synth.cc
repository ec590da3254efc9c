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

#include "relabel/synth.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string_view>
#include <vector>

#include "relabel/rng.h"

namespace relabel {
namespace {

constexpr std::array kPersons = {
    "John",    "Sarah",    "Michael",  "Priya",   "Ahmed",    "Emily",
    "David",   "Maria",    "Kevin",    "Anne",    "Carlos",   "Linda",
    "James",   "Fatima",   "Robert",   "Mei",     "Daniel",   "Olivia",
    "Thomas",  "Grace",    "Ravi",     "Sophie",  "Jason",    "Nadia",
    "Brian",   "Chloe",    "Victor",   "Hannah",  "Omar",     "Laura"};

constexpr std::array kSurnames = {
    "Smith", "Patel", "Garcia", "Nguyen", "Johnson", "Chen",
    "Brown", "Khan",  "Lopez",  "Wilson", "Kim",     "Martin"};

constexpr std::array kOrgs = {
    "Google",          "Microsoft",        "Netflix",
    "Amazon",          "Health Insurance USA", "Bank of America",
    "Verizon",         "Comcast",          "Delta Airlines",
    "University of Toronto", "Acme Corp",  "Salesforce",
    "Oracle",          "Deloitte",         "Walmart",
    "FedEx",           "Wells Fargo",      "Pfizer",
    "Kaiser Permanente", "Blue Cross",     "State Farm",
    "Geico",           "Allstate",         "IBM",
    "Cisco",           "Intel",            "Adobe",
    "Shopify",         "PayPal",           "Uber",
    "Airbnb",          "Expedia",          "Costco",
    "Home Depot",      "Northwind Traders", "Contoso",
    "Globex",          "Initech",          "Umbrella Health",
    "Stark Industries"};

constexpr std::array kProducts = {
    "iPhone",        "Galaxy S21",     "Windows",        "Office 365",
    "Zoom",          "Slack",          "Teams",          "Excel",
    "Outlook",       "Gmail",          "Chrome",         "Photoshop",
    "Kindle",        "Echo Dot",       "Prime Video",    "AirPods",
    "MacBook Pro",   "Surface Laptop", "Xbox",           "PlayStation",
    "QuickBooks",    "TurboTax",       "Dropbox",        "WhatsApp",
    "Instagram",     "Alexa",          "Fire TV",        "Pixel",
    "ThinkPad",      "Roku",           "Fitbit",         "Apple Watch",
    "Acrobat Reader", "Google Drive",  "Microsoft Word", "Venmo",
    "Sales Cloud",   "Azure",          "WebEx",          "Jira"};

constexpr std::array kPlaces = {
    "Toronto",   "New York",   "California", "Texas",     "London",
    "Chicago",   "India",      "Canada",     "Boston",    "Seattle",
    "Vancouver", "Mexico",     "Germany",    "Florida",   "Ohio",
    "Atlanta",   "Dallas",     "Paris",      "Ontario",   "Denver"};

constexpr std::array kTemplates = {
    // Organization context.
    "i work at {ORG} in {GPE}",
    "{PER} from {ORG} called about the invoice",
    "we signed a contract with {ORG} last week",
    "you gotta send email to the {ORG} team and ask for refund",
    "{ORG} will pay for your physiotherapy",
    "the {ORG} branch in {GPE} is closed today",
    "our account manager at {ORG} is {PER}",
    "{ORG} moved their headquarters to {GPE}",
    "she got hired by {ORG} last month",
    "can you transfer me to {ORG} customer service",
    "i have been a customer of {ORG} for ten years",
    "{ORG} approved the claim yesterday",
    // Product context.
    "i installed {PROD} on my laptop",
    "my {PROD} keeps crashing",
    "please update {PROD} to the latest version",
    "the {PROD} subscription renews monthly",
    "i can't log into {PROD} anymore",
    "{PROD} crashed during the meeting",
    "did you try restarting {PROD}",
    "we use {PROD} for all our calls",
    "the new {PROD} has a better battery",
    "can you share the file on {PROD}",
    "{PER} said {PROD} is not syncing",
    "i bought {PROD} from {ORG}",
    // Either type; only the name tells them apart.
    "i called about {ORGPROD}",
    "what do you think about {ORGPROD}",
    "i heard about {ORGPROD} from {PER}",
    "tell me more about {ORGPROD}",
    "yeah {ORGPROD} is really great",
    "so the issue is with {ORGPROD}",
    "we compared {ORGPROD} and {ORGPROD} last quarter",
    "any news from {ORGPROD} in {GPE}",
    // People and places.
    "this is {PER} calling from {GPE}",
    "{PER} will call you back tomorrow",
    "i'm flying to {GPE} next week",
    "hi {PER} how are you doing",
    "the meeting with {PER} is moved to friday",
    "our office in {GPE} handles that"};

constexpr std::array kFillers = {"um", "uh", "like", "um-hum", "you know"};

constexpr std::array kSyllables = {
    "ka", "ro", "vi", "len", "tor", "mi", "sa", "bel", "dex", "no",
    "ra", "zen", "qu", "lo", "fin", "ar", "cor", "va", "tek", "mon",
    "li", "sto", "ne", "pax", "dor", "ul", "bri", "sen", "ta", "gal"};

constexpr std::array kOrgSuffixes = {"Group", "Labs", "Systems", "Partners",
                                     "Bank", "Health", "Motors", "Insurance",
                                     "Logistics", "Airlines"};
constexpr std::array kProdSuffixes = {"Pro", "Max", "Plus", "360", "X",
                                      "Go", "Mini", "Cloud", "Studio", "Lite"};

constexpr std::size_t kGeneratedNames = 300;
constexpr std::uint64_t kWorldSeed = 0x6a2e1;

// Made-up names extending a curated head list into a long tail. The pool is
// fixed (independent of the corpus seed) so that separately generated
// corpora share one world.
template <std::size_t N, std::size_t M>
std::vector<std::string> name_pool(const std::array<const char*, N>& head,
                                   const std::array<const char*, M>& suffixes,
                                   std::uint64_t stream) {
  std::vector<std::string> pool(head.begin(), head.end());
  Rng rng(kWorldSeed, stream);
  while (pool.size() < head.size() + kGeneratedNames) {
    std::string name;
    const std::size_t syllables = 2 + rng.below(2);
    for (std::size_t k = 0; k < syllables; ++k) {
      name += kSyllables[rng.below(kSyllables.size())];
    }
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (rng.bernoulli(0.5)) {
      name += " ";
      name += suffixes[rng.below(suffixes.size())];
    }
    if (std::find(pool.begin(), pool.end(), name) == pool.end()) {
      pool.push_back(std::move(name));
    }
  }
  return pool;
}

const std::vector<std::string>& org_pool() {
  static const auto pool = name_pool(kOrgs, kOrgSuffixes, 1);
  return pool;
}

const std::vector<std::string>& prod_pool() {
  static const auto pool = name_pool(kProducts, kProdSuffixes, 2);
  return pool;
}

// Zipf-like rank weights, so a few names dominate and the tail is rare.
std::size_t zipf_draw(Rng& rng, std::size_t n) {
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) total += 1.0 / std::pow(r + 1.0, 0.8);
  double x = rng.unit() * total;
  for (std::size_t r = 0; r < n; ++r) {
    x -= 1.0 / std::pow(r + 1.0, 0.8);
    if (x < 0.0) return r;
  }
  return n - 1;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

struct Builder {
  const TagSet& ts;
  Utterance u;

  void word(const std::string& w) {
    u.tokens.push_back(w);
    u.gold_tags.push_back(kOutside);
  }
  void entity(std::string_view name, const char* type) {
    const std::size_t t = *ts.find_type(type);
    bool first = true;
    for (auto& w : split_words(name)) {
      u.tokens.push_back(std::move(w));
      u.gold_tags.push_back(first ? ts.begin_label(t) : ts.inside_label(t));
      first = false;
    }
  }
};

void fill_slot(Builder& b, std::string_view slot, Rng& rng) {
  if (slot == "ORGPROD") slot = rng.bernoulli(0.5) ? "ORG" : "PROD";
  if (slot == "ORG") {
    b.entity(org_pool()[zipf_draw(rng, org_pool().size())], "ORG");
  } else if (slot == "PROD") {
    b.entity(prod_pool()[zipf_draw(rng, prod_pool().size())], "PROD");
  } else if (slot == "GPE") {
    b.entity(kPlaces[zipf_draw(rng, kPlaces.size())], "GPE");
  } else {
    std::string name = kPersons[rng.below(kPersons.size())];
    if (rng.bernoulli(0.4)) {
      name += " ";
      name += kSurnames[rng.below(kSurnames.size())];
    }
    b.entity(name, "PER");
  }
}

}  // namespace

Corpus generate_corpus(const SynthConfig& config) {
  Corpus corpus;
  corpus.tag_set = TagSet::Default();
  corpus.split = config.split;
  Rng rng(config.seed, 0x5e47);

  for (std::size_t n = 0; n < config.utterances; ++n) {
    Builder b{corpus.tag_set, {}};
    b.u.id = config.id_prefix + std::to_string(n + 1);
    const auto words = split_words(kTemplates[rng.below(kTemplates.size())]);
    const bool add_filler = rng.bernoulli(config.filler_prob);
    const std::size_t filler_at = rng.below(words.size() + 1);
    for (std::size_t i = 0; i <= words.size(); ++i) {
      if (add_filler && i == filler_at) {
        for (auto& w : split_words(kFillers[rng.below(kFillers.size())])) {
          b.word(w);
        }
      }
      if (i == words.size()) break;
      const auto& w = words[i];
      if (w.size() > 2 && w.front() == '{' && w.back() == '}') {
        fill_slot(b, std::string_view(w).substr(1, w.size() - 2), rng);
      } else {
        b.word(w);
      }
    }
    if (rng.bernoulli(config.lowercase_prob)) {
      for (auto& tok : b.u.tokens) {
        for (auto& c : tok) {
          c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
      }
    }
    corpus.utterances.push_back(std::move(b.u));
  }
  if (config.split == Split::kUnlabeled) return strip_labels(corpus);
  return corpus;
}

}  // namespace relabel
