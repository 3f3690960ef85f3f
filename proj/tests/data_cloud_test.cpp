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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "common.hpp"
#include "expect_error.hpp"
#include "flexcloud/data_cloud.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace flexcloud {
namespace {

std::vector<std::string> texts(const std::vector<QueryTerm>& q) {
  std::vector<std::string> out;
  for (const auto& t : q) out.push_back(t.text());
  return out;
}

void expect_cloud_matches(const Store& store, const EntitySpec& spec, const SearchIndex& idx,
                          const std::string& query, std::size_t k) {
  const auto terms = parse_query(query);
  const DataCloud got = compute_cloud(idx, search(idx, terms), k);
  const auto hits = oracle::scan_search(store, spec, texts(terms));
  const auto want = oracle::scan_cloud(store, spec, hits, texts(terms), k);
  ASSERT_EQ(got.terms.size(), want.size()) << query;
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got.terms[i].term, want[i].term) << query << " #" << i;
    EXPECT_EQ(got.terms[i].weight, want[i].weight) << query << " #" << i;
    EXPECT_EQ(got.terms[i].doc_count, want[i].doc_count) << query << " #" << i;
  }
}

class FixtureCloud : public ::testing::Test {
 protected:
  Store store = support::fixture_store();
  EntitySpec spec = default_course_spec();
  SearchIndex idx = SearchIndex::build(store, spec);
};

TEST(Stopwords, SortedEmbeddedList) {
  const auto words = stopwords();
  EXPECT_GE(words.size(), 100u);
  EXPECT_TRUE(std::is_sorted(words.begin(), words.end()));
  EXPECT_TRUE(is_stopword("the"));
  EXPECT_FALSE(is_stopword("american"));
}

TEST_F(FixtureCloud, EmptyResultGivesEmptyCloud) {
  EXPECT_TRUE(compute_cloud(idx, search(idx, parse_query("quantum"))).terms.empty());
}

TEST_F(FixtureCloud, ProgrammingMatchesRecount) {
  const DataCloud cloud = compute_cloud(idx, search(idx, parse_query("programming")));
  std::set<std::string> terms;
  for (const auto& t : cloud.terms) terms.insert(t.term);
  EXPECT_TRUE(terms.count("languages"));
  EXPECT_TRUE(terms.count("advanced"));
  EXPECT_FALSE(terms.count("programming"));
  expect_cloud_matches(store, spec, idx, "programming", kDefaultCloudSize);
}

TEST_F(FixtureCloud, AmericanHasMultiwordTermsFromComments) {
  const DataCloud cloud = compute_cloud(idx, search(idx, parse_query("american")));
  std::set<std::string> terms;
  for (const auto& t : cloud.terms) terms.insert(t.term);
  EXPECT_TRUE(terms.count("latin american"));
  EXPECT_TRUE(terms.count("african american"));
  EXPECT_FALSE(terms.count("american"));
  expect_cloud_matches(store, spec, idx, "american", kDefaultCloudSize);
}

TEST_F(FixtureCloud, ClickingAfricanAmericanNarrowsToPhraseScan) {
  const SearchResult before = search(idx, parse_query("american"));
  const Refinement r = refine(idx, parse_query("american"), QueryTerm::from_text("african american"));
  const auto scan = oracle::scan_search(store, spec, {"african american"});
  std::set<std::int64_t> got, want, old;
  for (const auto& h : r.result.hits) got.insert(h.id.as_int());
  for (const auto& h : scan) want.insert(h.id.as_int());
  for (const auto& h : before.hits) old.insert(h.id.as_int());
  EXPECT_EQ(got, want);
  EXPECT_FALSE(got.empty());
  EXPECT_LT(got.size(), old.size());
  EXPECT_TRUE(std::includes(old.begin(), old.end(), got.begin(), got.end()));
  EXPECT_EQ(format_query(r.cloud.query), "american \"african american\"");
}

TEST_F(FixtureCloud, StaleTerm) {
  EXPECT_FC_ERROR(refine(idx, parse_query("american"), QueryTerm::from_text("java")), ErrorCode::kStaleTerm);
  EXPECT_FC_ERROR(QueryTerm::from_text("a b c"), ErrorCode::kBadQuery);
}

TEST_F(FixtureCloud, EveryTermRefinesToNonEmptySubset) {
  for (const std::string q : {"american", "programming", "history"}) {
    const SearchResult base = search(idx, parse_query(q));
    std::set<std::int64_t> old;
    for (const auto& h : base.hits) old.insert(h.id.as_int());
    for (const auto& t : compute_cloud(idx, base).terms) {
      const Refinement r = refine(idx, parse_query(q), QueryTerm::from_text(t.term));
      ASSERT_FALSE(r.result.hits.empty()) << q << " + " << t.term;
      EXPECT_EQ(r.result.total, t.doc_count) << q << " + " << t.term;
      for (const auto& h : r.result.hits) EXPECT_TRUE(old.count(h.id.as_int()));
    }
  }
}

TEST_F(FixtureCloud, SmallerKIsPrefix) {
  const SearchResult r = search(idx, parse_query("american"));
  const DataCloud big = compute_cloud(idx, r, 30);
  const DataCloud small = compute_cloud(idx, r, 10);
  ASSERT_EQ(small.terms.size(), 10u);
  for (std::size_t i = 0; i < small.terms.size(); ++i) EXPECT_EQ(small.terms[i].term, big.terms[i].term);
  EXPECT_TRUE(compute_cloud(idx, r, 0).terms.empty());
}

TEST(CloudProperties, RandomStoresMatchRecount) {
  gen::Rng rng(99);
  for (int s = 0; s < 5; ++s) {
    const auto c = gen::search_case(rng, 40, 120);
    const SearchIndex idx = SearchIndex::build(c.store, c.spec);
    for (int q = 0; q < 10; ++q) {
      expect_cloud_matches(c.store, c.spec, idx, gen::random_query(rng, c).text, 1 + rng() % 40);
    }
  }
}

}  // namespace
}  // namespace flexcloud
