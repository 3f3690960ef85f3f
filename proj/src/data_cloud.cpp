// Copyright 2026 The FlexCloud Authors
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

#include "flexcloud/data_cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "flexcloud/error.hpp"

namespace flexcloud {

namespace {

// Keep sorted; looked up by binary search.
constexpr std::array<std::string_view, 127> kStopwords = {
    "a",       "about",   "above",   "after",   "again",   "against", "all",     "also",
    "am",      "an",      "and",     "any",     "are",     "as",      "at",      "be",
    "because", "been",    "before",  "being",   "below",   "between", "both",    "but",
    "by",      "can",     "could",   "did",     "do",      "does",    "doing",   "down",
    "during",  "each",    "few",     "for",     "from",    "further", "had",     "has",
    "have",    "having",  "he",      "her",     "here",    "hers",    "herself", "him",
    "himself", "his",     "how",     "i",       "if",      "in",      "into",    "is",
    "it",      "its",     "itself",  "just",    "me",      "more",    "most",    "my",
    "myself",  "no",      "nor",     "not",     "now",     "of",      "off",     "on",
    "once",    "only",    "or",      "other",   "our",     "ours",    "out",     "over",
    "own",     "s",       "same",    "she",     "should",  "so",      "some",    "such",
    "t",       "than",    "that",    "the",     "their",   "theirs",  "them",    "then",
    "there",   "these",   "they",    "this",    "those",   "through", "to",      "too",
    "under",   "until",   "up",      "very",    "was",     "we",      "were",    "what",
    "when",    "where",   "which",   "while",   "who",     "whom",    "why",     "will",
    "with",    "would",   "you",     "your",    "yours",   "yourself", "yourselves",
};

bool cloud_eligible(const SearchIndex& index, std::uint32_t term) {
  const std::string& text = index.term_text(term);
  if (!index.term_is_bigram(term)) return !is_stopword(text);
  const auto space = text.find(' ');
  return !is_stopword(std::string_view(text).substr(0, space)) &&
         !is_stopword(std::string_view(text).substr(space + 1));
}

}  // namespace

std::span<const std::string_view> stopwords() { return kStopwords; }

bool is_stopword(std::string_view token) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), token);
}

DataCloud compute_cloud(const SearchIndex& index, const SearchResult& result, std::size_t k) {
  DataCloud cloud;
  cloud.query = result.query;
  if (result.hits.empty() || k == 0) return cloud;

  struct Tally {
    std::uint64_t tf = 0;
    std::size_t docs = 0;
  };
  std::unordered_map<std::uint32_t, Tally> tallies;
  for (const auto& hit : result.hits) {
    for (const auto& tc : index.entity_terms(hit.entity)) {
      auto& t = tallies[tc.term];
      t.tf += tc.tf;
      ++t.docs;
    }
  }
  std::vector<std::uint32_t> excluded;
  for (const auto& q : result.query) {
    if (const auto id = index.term_id(q.text())) excluded.push_back(*id);
  }

  const double n = static_cast<double>(index.entity_count());
  cloud.terms.reserve(tallies.size());
  for (const auto& [term, tally] : tallies) {
    if (!cloud_eligible(index, term)) continue;
    if (std::find(excluded.begin(), excluded.end(), term) != excluded.end()) continue;
    const double df = static_cast<double>(index.document_frequency(term));
    const double weight = static_cast<double>(tally.tf) * std::log(1.0 + n / df);
    cloud.terms.push_back({index.term_text(term), weight, tally.docs});
  }
  const auto order = [](const CloudTerm& a, const CloudTerm& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.term < b.term;
  };
  if (cloud.terms.size() > k) {
    std::partial_sort(cloud.terms.begin(), cloud.terms.begin() + static_cast<std::ptrdiff_t>(k),
                      cloud.terms.end(), order);
    cloud.terms.resize(k);
  } else {
    std::sort(cloud.terms.begin(), cloud.terms.end(), order);
  }
  return cloud;
}

Refinement refine(const SearchIndex& index, const std::vector<QueryTerm>& query,
                  const QueryTerm& clicked, std::size_t k) {
  const SearchResult current = search(index, query);
  const auto id = index.term_id(clicked.text());
  bool present = false;
  if (id) {
    std::vector<bool> in_result(index.entity_count(), false);
    for (const auto& hit : current.hits) in_result[hit.entity] = true;
    for (const auto& p : index.postings(*id)) {
      if (in_result[p.entity]) {
        present = true;
        break;
      }
    }
  }
  if (!present) {
    throw Error(ErrorCode::kStaleTerm,
                "term '" + clicked.text() + "' does not occur in the current results");
  }
  std::vector<QueryTerm> refined = current.query;
  if (std::find(refined.begin(), refined.end(), clicked) == refined.end()) refined.push_back(clicked);
  Refinement out;
  out.result = search(index, std::move(refined));
  out.cloud = compute_cloud(index, out.result, k);
  return out;
}

}  // namespace flexcloud
