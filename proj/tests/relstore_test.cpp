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

#include <fstream>
#include <sstream>

#include "common.hpp"
#include "expect_error.hpp"
#include "flexcloud/relstore.hpp"

namespace flexcloud {
namespace {

using support::data_dir;

// Minimal reader for the fixture files: comma split with quoted fields that
// contain no doubled quotes or line breaks.
std::vector<std::vector<std::string>> simple_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    rows.push_back(cells);
  }
  return rows;
}

TEST(Schema, LoadsFixtureRelations) {
  const Schema s = support::fixture_schema();
  ASSERT_EQ(s.relations.size(), 3u);
  EXPECT_EQ(s.relations[0].name, "Courses");
  EXPECT_EQ(s.relations[1].name, "Students");
  EXPECT_EQ(s.relations[2].name, "Comments");
  const RelationDef* students = s.find("Students");
  ASSERT_NE(students, nullptr);
  std::vector<std::string> names;
  for (const auto& c : students->columns) names.push_back(c.name);
  EXPECT_EQ(names, (std::vector<std::string>{"SuID", "Name", "Class", "GPA"}));
  EXPECT_EQ(students->primary_key, "SuID");
  EXPECT_EQ(s.find("Comments")->columns[6].type, ColumnType::kFloat);
}

TEST(Schema, EmptyDocument) {
  EXPECT_TRUE(load_schema(R"({"relations":[]})").relations.empty());
}

TEST(Schema, Rejections) {
  const std::string msg = EXPECT_FC_ERROR(
      load_schema(R"({"relations":[{"name":"Courses","primary_key":"Nope","columns":[{"name":"CourseID","type":"int"}]}]})"),
      ErrorCode::kSchema);
  EXPECT_NE(msg.find("Courses"), std::string::npos);
  EXPECT_NE(msg.find("Nope"), std::string::npos);
  EXPECT_FC_ERROR(load_schema("{\"relations\":["), ErrorCode::kParse);
  const std::string dup = EXPECT_FC_ERROR(
      load_schema(R"({"relations":[{"name":"A","primary_key":"x","columns":[{"name":"x","type":"int"}]},
                                   {"name":"A","primary_key":"x","columns":[{"name":"x","type":"int"}]}]})"),
      ErrorCode::kSchema);
  EXPECT_NE(dup.find("'A'"), std::string::npos);
  EXPECT_FC_ERROR(load_schema(R"({"relations":[{"name":"A","primary_key":"x","columns":[{"name":"x","type":"int"},{"name":"x","type":"text"}]}]})"),
                  ErrorCode::kSchema);
  EXPECT_FC_ERROR(load_schema(R"({"relations":[{"name":"A","primary_key":"x","columns":[{"name":"x","type":"blob"}]}]})"),
                  ErrorCode::kSchema);
  EXPECT_FC_ERROR(load_schema(R"({"relations":[{"name":"A","primary_key":"x","columns":[{"name":"x","type":"float"}]}]})"),
                  ErrorCode::kSchema);
}

class Csv : public ::testing::Test {
 protected:
  Schema schema = support::fixture_schema();
};

TEST_F(Csv, HeaderOnly) {
  EXPECT_TRUE(ingest_csv(schema, "Students", "SuID,Name,Class,GPA\n").empty());
}

TEST_F(Csv, FiveRowCoursesMatchIndependentReader) {
  const std::string text = read_file(data_dir() / "small" / "Courses.csv");
  const Relation rel = ingest_csv(schema, "Courses", text);
  const auto rows = simple_csv(text);
  ASSERT_EQ(rel.size(), 5u);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t r = 0; r < 5; ++r) {
    const auto& cells = rows[r + 1];
    const Tuple& t = rel.tuples[r];
    EXPECT_EQ(t[0], Value(static_cast<std::int64_t>(std::stoll(cells[0]))));
    for (std::size_t c : {1u, 2u, 3u, 5u}) {
      EXPECT_EQ(t[c], cells[c].empty() ? Value() : Value(cells[c])) << r << "," << c;
    }
    EXPECT_EQ(t[4], Value(static_cast<std::int64_t>(std::stoll(cells[4]))));
  }
}

TEST_F(Csv, DuplicateKeyReportsLaterRow) {
  const std::string csv =
      "CourseID,DeptID,Title,Description,Units,Url\n"
      "1,CS,A,,5,\n"
      "2,CS,B,,5,\n"
      "1,CS,C,,5,\n";
  const std::string msg = EXPECT_FC_ERROR(ingest_csv(schema, "Courses", csv), ErrorCode::kCsv);
  EXPECT_NE(msg.find("row 4"), std::string::npos) << msg;
}

TEST_F(Csv, QuotingNullsAndColumnOrder) {
  const std::string csv =
      "GPA,Name,SuID,Class\r\n"
      "3.5,\"Doe, \"\"J\"\"\",7,2010\r\n"
      ",\"multi\nline\",8,\r\n";
  const Relation rel = ingest_csv(schema, "Students", csv);
  ASSERT_EQ(rel.size(), 2u);
  EXPECT_EQ(rel.tuples[0], (Tuple{Value(7), Value("Doe, \"J\""), Value(2010), Value(3.5)}));
  EXPECT_EQ(rel.tuples[1], (Tuple{Value(8), Value("multi\nline"), Value(), Value()}));
}

TEST_F(Csv, IntegralRatingsBecomeFloats) {
  const Relation rel = ingest_csv(schema, "Comments", "CommentID,SuID,CourseID,Year,Term,Text,Rating,Date\n1,2,3,2008,,,4,\n");
  EXPECT_TRUE(rel.tuples[0][6].is_float());
  EXPECT_EQ(rel.tuples[0][6].as_float(), 4.0);
}

TEST_F(Csv, Rejections) {
  EXPECT_NE(EXPECT_FC_ERROR(ingest_csv(schema, "Students", "SuID,Name,Class,GPA\n1,a,2\n"), ErrorCode::kCsv).find("row 2"),
            std::string::npos);
  EXPECT_FC_ERROR(ingest_csv(schema, "Students", "SuID,Name,Class,GPA\nx,a,2,3\n"), ErrorCode::kCsv);
  EXPECT_FC_ERROR(ingest_csv(schema, "Students", "SuID,Name,Class,GPA\n1,a,2,3.5.1\n"), ErrorCode::kCsv);
  EXPECT_FC_ERROR(ingest_csv(schema, "Students", "SuID,Name,Class\n"), ErrorCode::kCsv);
  EXPECT_FC_ERROR(ingest_csv(schema, "Students", "SuID,Name,Class,GPA\n,a,2,3\n"), ErrorCode::kCsv);
  EXPECT_FC_ERROR(ingest_csv(schema, "Students", "SuID,Name,Class,GPA\n1,\"open,2,3\n"), ErrorCode::kCsv);
  EXPECT_FC_ERROR(ingest_csv(schema, "Nope", "a\n"), ErrorCode::kUnknownRelation);
}

TEST_F(Csv, IngestionIsDeterministic) {
  EXPECT_EQ(support::fixture_store(), support::fixture_store());
}

TEST(Snapshot, EmptyStoreRoundTrips) {
  const Store empty;
  EXPECT_EQ(snapshot_load(snapshot_save(empty)), empty);
}

TEST(Snapshot, FixtureRoundTripsTupleForTuple) {
  const Store s = support::fixture_store();
  const Store back = snapshot_load(snapshot_save(s));
  ASSERT_EQ(back.relations().size(), s.relations().size());
  for (std::size_t r = 0; r < s.relations().size(); ++r) {
    EXPECT_EQ(back.relations()[r].def, s.relations()[r].def);
    ASSERT_EQ(back.relations()[r].tuples.size(), s.relations()[r].tuples.size());
    for (std::size_t t = 0; t < s.relations()[r].tuples.size(); ++t) {
      EXPECT_EQ(back.relations()[r].tuples[t], s.relations()[r].tuples[t]);
    }
  }
  EXPECT_EQ(snapshot_save(back), snapshot_save(s));
}

TEST(Snapshot, CorruptInputs) {
  const std::string good = snapshot_save(support::fixture_store());
  // Inflate the row count of the first relation.
  std::string longer = good;
  const auto at = longer.find("\"rows\":12");
  ASSERT_NE(at, std::string::npos);
  longer.replace(at, 9, "\"rows\":13");
  EXPECT_FC_ERROR(snapshot_load(longer), ErrorCode::kSnapshot);

  std::string shorter = good;
  shorter.replace(shorter.find("\"rows\":12"), 9, "\"rows\":11");
  EXPECT_FC_ERROR(snapshot_load(shorter), ErrorCode::kSnapshot);

  EXPECT_FC_ERROR(snapshot_load(good.substr(0, good.size() / 2)), ErrorCode::kSnapshot);
  std::string version = good;
  version.replace(0, version.find('\n'), "{\"flexcloud_snapshot\":2}");
  EXPECT_FC_ERROR(snapshot_load(version), ErrorCode::kSnapshot);
  EXPECT_FC_ERROR(snapshot_load(std::string_view("")), ErrorCode::kSnapshot);
}

TEST(Snapshot, MapValuesRoundTrip) {
  Schema schema{{{"M", {{"k", ColumnType::kInt}, {"m", ColumnType::kMap}}, "k"}}};
  Store s(schema, {{schema.relations[0], {{Value(1), Value(RatingMap{{3, 0.1}, {-2, 5.0}})}, {Value(2), Value(RatingMap{})}}}});
  EXPECT_EQ(snapshot_load(snapshot_save(s)), s);
}

TEST(Utf8, Validation) {
  EXPECT_TRUE(is_valid_utf8("caf\xc3\xa9"));
  EXPECT_FALSE(is_valid_utf8("\xc3"));
  EXPECT_FALSE(is_valid_utf8("\xff"));
  EXPECT_TRUE(is_identifier("_score"));
  EXPECT_FALSE(is_identifier("9a"));
}

}  // namespace
}  // namespace flexcloud
