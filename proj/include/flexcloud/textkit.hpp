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

#include <string>
#include <string_view>
#include <vector>

#include "flexcloud/value.hpp"

namespace flexcloud {

// Ordered lowercase terms; order is kept so adjacent pairs form bigrams.
using TokenList = std::vector<std::string>;

enum class SimilarityFn { kJaccard, kPearson, kInvEuclidean };

std::string_view similarity_fn_name(SimilarityFn fn);  // "jaccard", "pearson", "inv_euclidean"
bool parse_similarity_fn(std::string_view name, SimilarityFn& out);

// Lowercases ASCII letters and splits on every ASCII character that is not a
// letter or digit. Bytes >= 0x80 are kept as word characters so multi-byte
// UTF-8 letters stay inside their token. No stemming, no stopwords.
TokenList tokenize(std::string_view text);

// |A n B| / |A u B| over the token sets; 0 when both are empty.
double sim_jaccard(const TokenList& a, const TokenList& b);

// 1 / (1 + euclidean distance over common keys); 0 without common keys.
double sim_inv_euclidean(const RatingMap& u, const RatingMap& v);

// Pearson correlation over common keys; 0 with fewer than two common keys or
// when either restricted vector is constant.
double sim_pearson(const RatingMap& u, const RatingMap& v);

}  // namespace flexcloud
