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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flexcloud/relstore.hpp"
#include "flexcloud/textkit.hpp"

namespace flexcloud {

struct FieldSpec {
  std::string column;
  double weight = 1.0;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

// A relation joined to the root on root_column = part_column; every joined
// row contributes its text to the entity.
struct PartSpec {
  std::string relation;
  std::string root_column;
  std::string part_column;
  std::vector<FieldSpec> fields;

  friend bool operator==(const PartSpec&, const PartSpec&) = default;
};

// A searchable entity: one per root tuple, identified by the root primary key.
struct EntitySpec {
  std::string name;
  std::string root;
  std::vector<FieldSpec> root_fields;
  std::vector<PartSpec> parts;

  static EntitySpec from_json(std::string_view document);
  std::string to_json() const;

  friend bool operator==(const EntitySpec&, const EntitySpec&) = default;
};

// Title 3.0, Description 2.0, Comments.Text 1.0 over the course fixture schema.
EntitySpec default_course_spec();

struct EntityField {
  std::string label;     // "Title" for root fields, "Comments.Text" for parts
  std::string relation;
  double weight = 1.0;
  // One token list per contributing row; bigrams never span two segments.
  std::vector<TokenList> segments;
};

struct Entity {
  Value id;
  std::vector<EntityField> fields;
};

// A unigram or an adjacent-token bigram.
struct QueryTerm {
  std::vector<std::string> tokens;

  bool is_bigram() const { return tokens.size() == 2; }
  std::string text() const;  // tokens joined by one space

  static QueryTerm from_text(std::string_view term);

  friend bool operator==(const QueryTerm&, const QueryTerm&) = default;
};

// Splits a user query: bare words become unigrams, a double-quoted phrase
// becomes a bigram (or a unigram if it holds one word). Duplicates are
// dropped keeping first occurrence. Throws kBadQuery on a phrase longer than
// two words or an unterminated quote.
std::vector<QueryTerm> parse_query(std::string_view text);

// Renders terms back to query syntax, quoting bigrams.
std::string format_query(const std::vector<QueryTerm>& terms);

struct SearchHit {
  Value id;
  double score = 0.0;
  std::vector<std::string> fields;  // labels of fields holding any query term
  std::size_t entity = 0;           // position in SearchIndex::entities()
};

struct SearchResult {
  std::vector<QueryTerm> query;
  std::vector<SearchHit> hits;  // score desc, id asc
  std::size_t total = 0;        // hit count before any limit
};

class SearchIndex {
 public:
  struct Posting {
    std::uint32_t entity;
    std::uint32_t field;
    std::uint32_t tf;
  };
  struct TermCount {
    std::uint32_t term;
    std::uint32_t tf;  // summed over all fields of the entity
  };

  static SearchIndex build(const Store& store, const EntitySpec& spec);

  const EntitySpec& spec() const { return spec_; }
  const std::vector<Entity>& entities() const { return entities_; }
  std::size_t entity_count() const { return entities_.size(); }

  std::optional<std::uint32_t> term_id(std::string_view term) const;
  const std::string& term_text(std::uint32_t id) const { return vocabulary_[id]; }
  bool term_is_bigram(std::uint32_t id) const { return bigram_[id]; }
  std::size_t vocabulary_size() const { return vocabulary_.size(); }

  // Sorted by (entity, field).
  const std::vector<Posting>& postings(std::uint32_t term) const { return postings_[term]; }
  std::size_t document_frequency(std::uint32_t term) const { return document_frequency_[term]; }
  // Sorted by term id.
  const std::vector<TermCount>& entity_terms(std::size_t entity) const { return forward_[entity]; }

 private:
  std::uint32_t intern(const std::string& term, bool bigram);

  EntitySpec spec_;
  std::vector<Entity> entities_;
  std::vector<std::string> vocabulary_;
  std::vector<bool> bigram_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<std::size_t> document_frequency_;
  std::vector<std::vector<TermCount>> forward_;
};

// Conjunctive search: an entity matches iff every query term occurs in one of
// its fields; score = sum over terms and fields of weight * tf. Throws
// kEmptyQuery for an empty query.
SearchResult search(const SearchIndex& index, std::vector<QueryTerm> query,
                    std::optional<std::size_t> limit = std::nullopt);

SearchResult truncate(SearchResult result, std::optional<std::size_t> limit);

}  // namespace flexcloud
