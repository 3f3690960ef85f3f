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

#include <cmath>
#include <limits>

#include "flexcloud/value.hpp"

namespace flexcloud {
namespace {

TEST(Value, StructuralEqualityKeepsKinds) {
  EXPECT_EQ(Value(1), Value(std::int64_t{1}));
  EXPECT_NE(Value(1), Value(1.0));
  EXPECT_EQ(Value(), Value(Null{}));
  EXPECT_NE(Value(""), Value());
}

TEST(Value, ComparisonsWithNullAreUnknown) {
  EXPECT_FALSE(compare_values(Value(), Value()).has_value());
  EXPECT_FALSE(compare_values(Value(3), Value()).has_value());
  EXPECT_FALSE(compare_values(Value("a"), Value(1)).has_value());
}

TEST(Value, IntAndFloatCompareNumerically) {
  EXPECT_EQ(*compare_values(Value(2), Value(2.0)), std::partial_ordering::equivalent);
  EXPECT_EQ(*compare_values(Value(2), Value(2.5)), std::partial_ordering::less);
  EXPECT_EQ(*compare_values(Value("b"), Value("a")), std::partial_ordering::greater);
}

TEST(Value, KeyOrderPutsNullFirst) {
  EXPECT_TRUE(std::is_lt(key_order(Value(), Value(-5))));
  EXPECT_TRUE(std::is_lt(key_order(Value(-5), Value(3))));
  EXPECT_TRUE(std::is_lt(key_order(Value("Apple"), Value("apple"))));
}

TEST(Value, FormatDoubleRoundTrips) {
  EXPECT_EQ(format_double(4.0), "4");
  EXPECT_EQ(format_double(0.25), "0.25");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  for (double d : {0.1, 1e-300, 123456789.125, -2.5, 1e21}) {
    EXPECT_EQ(std::stod(format_double(d)), d);
  }
}

TEST(Value, TypeNames) {
  for (auto t : {ColumnType::kInt, ColumnType::kFloat, ColumnType::kText, ColumnType::kMap}) {
    EXPECT_EQ(parse_column_type(column_type_name(t)), t);
  }
  EXPECT_FALSE(parse_column_type("double").has_value());
  EXPECT_TRUE(value_matches_type(Value(), ColumnType::kInt));
  EXPECT_FALSE(value_matches_type(Value(1), ColumnType::kFloat));
}

}  // namespace
}  // namespace flexcloud
