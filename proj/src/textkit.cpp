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

#include "flexcloud/textkit.hpp"

#include <algorithm>
#include <cmath>

namespace flexcloud {

std::string_view similarity_fn_name(SimilarityFn fn) {
  switch (fn) {
    case SimilarityFn::kJaccard: return "jaccard";
    case SimilarityFn::kPearson: return "pearson";
    case SimilarityFn::kInvEuclidean: return "inv_euclidean";
  }
  return "jaccard";
}

bool parse_similarity_fn(std::string_view name, SimilarityFn& out) {
  if (name == "jaccard") {
    out = SimilarityFn::kJaccard;
  } else if (name == "pearson") {
    out = SimilarityFn::kPearson;
  } else if (name == "inv_euclidean") {
    out = SimilarityFn::kInvEuclidean;
  } else {
    return false;
  }
  return true;
}

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double sim_jaccard(const TokenList& a, const TokenList& b) {
  TokenList sa = a;
  TokenList sb = b;
  std::sort(sa.begin(), sa.end());
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  std::sort(sb.begin(), sb.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = sa.begin();
  auto ib = sb.begin();
  while (ia != sa.end() && ib != sb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t total = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(total);
}

namespace {

// Walks the common keys of two maps in ascending key order.
template <typename Fn>
void for_common_keys(const RatingMap& u, const RatingMap& v, Fn&& fn) {
  auto iu = u.begin();
  auto iv = v.begin();
  while (iu != u.end() && iv != v.end()) {
    if (iu->first < iv->first) {
      ++iu;
    } else if (iv->first < iu->first) {
      ++iv;
    } else {
      fn(iu->second, iv->second);
      ++iu;
      ++iv;
    }
  }
}

}  // namespace

double sim_inv_euclidean(const RatingMap& u, const RatingMap& v) {
  std::size_t common = 0;
  double sum_sq = 0.0;
  for_common_keys(u, v, [&](double a, double b) {
    const double d = a - b;
    sum_sq += d * d;
    ++common;
  });
  if (common == 0) return 0.0;
  return 1.0 / (1.0 + std::sqrt(sum_sq));
}

double sim_pearson(const RatingMap& u, const RatingMap& v) {
  std::vector<double> xs;
  std::vector<double> ys;
  for_common_keys(u, v, [&](double a, double b) {
    xs.push_back(a);
    ys.push_back(b);
  });
  if (xs.size() < 2) return 0.0;
  // A constant vector has zero variance; test it exactly instead of trusting
  // a rounded variance to come out as 0.
  const auto constant = [](const std::vector<double>& w) {
    return std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); });
  };
  if (constant(xs) || constant(ys)) return 0.0;
  const double n = static_cast<double>(xs.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double cov = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  if (vx * vy == 0.0) return 0.0;
  // vx * vy and vy * vx are the same IEEE product, so the result is symmetric.
  const double r = cov / std::sqrt(vx * vy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace flexcloud
