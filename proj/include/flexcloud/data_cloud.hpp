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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flexcloud/entity_search.hpp"

namespace flexcloud {

inline constexpr std::size_t kDefaultCloudSize = 30;

struct CloudTerm {
  std::string term;  // unigram, or two tokens joined by a space
  double weight = 0.0;
  std::size_t doc_count = 0;  // hit entities containing the term
};

// Terms sorted by weight descending, ties by term ascending.
struct DataCloud {
  std::vector<QueryTerm> query;
  std::vector<CloudTerm> terms;
};

// The embedded English stopword list, sorted.
std::span<const std::string_view> stopwords();
bool is_stopword(std::string_view token);

// Cloud over every hit of `result` (pass the unlimited result to summarize
// the whole result set). Candidates are non-stopword unigrams and bigrams of
// two non-stopwords; weight = (summed tf over hits) * ln(1 + N / df).
// Terms already in the query are skipped.
DataCloud compute_cloud(const SearchIndex& index, const SearchResult& result,
                        std::size_t k = kDefaultCloudSize);

struct Refinement {
  SearchResult result;
  DataCloud cloud;
};

// Adds `clicked` to the query and recomputes results and cloud. Throws
// kStaleTerm when `clicked` occurs in none of the current hits.
Refinement refine(const SearchIndex& index, const std::vector<QueryTerm>& query,
                  const QueryTerm& clicked, std::size_t k = kDefaultCloudSize);

}  // namespace flexcloud
