/*
 * Copyright 2026 The panellime Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "panellime/data_table.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "panellime/common.h"
#include "test_util.h"

namespace panellime {
namespace {

using testing::table_from_text;

const Schema kPanel{"Country", "Year", "Economic Freedom", {}};

DataTable sample() {
  return load_csv(testing::source_dir() / "data" / "freedom_sample.csv", kPanel);
}

Eigen::Index row_of(const DataTable& t, const std::string& label) {
  for (Eigen::Index r = 0; r < t.n_rows(); ++r) {
    if (t.row_label(r) == label) return r;
  }
  return -1;
}

TEST(LoadCsv, MissingTokensBecomeMissingCells) {
  const DataTable t = sample();
  EXPECT_EQ(t.n_rows(), 10);
  const Eigen::Index r = row_of(t, "Bangladesh 1995");
  ASSERT_GE(r, 0);
  EXPECT_DOUBLE_EQ(t.value(r, t.column_index("5a_credit_market_reg")), 5.122456);
  EXPECT_TRUE(t.is_missing(r, t.column_index("5b_labor_market_reg")));
  EXPECT_TRUE(t.is_missing(r, t.column_index("5c_business_reg")));
}

TEST(LoadCsv, MissingTokenSpellings) {
  for (const char* token : {"", "N/A", "NA", "na", " n/a "}) EXPECT_TRUE(is_missing_token(token)) << token;
  EXPECT_FALSE(is_missing_token("0"));
  EXPECT_FALSE(is_missing_token("NaNa"));
}

TEST(LoadCsv, HeaderOnlyGivesEmptyTable) {
  const DataTable t = table_from_text("Country,Year,Economic Freedom\n", kPanel);
  EXPECT_EQ(t.n_rows(), 0);
  EXPECT_EQ(t.n_cols(), 3);
}

TEST(LoadCsv, SortsRowsByEntityThenTime) {
  const DataTable t = table_from_text("Country,Year,Economic Freedom\nA,2000,1\nA,1999,2\nA,2001,3\n", kPanel);
  EXPECT_EQ(t.value(0, 1), 1999);
  EXPECT_EQ(t.value(1, 1), 2000);
  EXPECT_EQ(t.value(2, 1), 2001);
  EXPECT_EQ(t.value(0, 2), 2);
}

TEST(LoadCsv, Errors) {
  EXPECT_THROW(table_from_text("Country,Year,Economic Freedom\nA,2000,x\n", kPanel), DataError);
  EXPECT_THROW(table_from_text("Country,Year,Economic Freedom\nA,2000,1\nA,2000,2\n", kPanel), DataError);
  EXPECT_THROW(table_from_text("Country,Year\nA,2000\n", kPanel), DataError);
  EXPECT_THROW(load_csv("/nonexistent/file.csv", kPanel), DataError);
}

TEST(LoadCsv, AsWrittenKeepsFileOrderAndAllowsRepeatedTimes) {
  const DataTable t =
      table_from_text("Country,Year,Economic Freedom\nB,1,1\nA,1,2\nA,1,3\n", kPanel, RowOrder::as_written);
  EXPECT_EQ(t.entity_label(0), "B");
  EXPECT_EQ(t.value(0, 0), 1);  // codes stay lexicographic
  EXPECT_EQ(t.value(1, 0), 0);
}

TEST(EncodeEntities, LexicographicCodes) {
  const DataTable t =
      table_from_text("Country,Year,Economic Freedom\nBrazil,1,1\nAndorra,1,2\nBrazil,2,3\n", kPanel);
  const auto [encoded, codebook] = encode_entities(t);
  EXPECT_EQ(*codebook.code("Andorra"), 0);
  EXPECT_EQ(*codebook.code("Brazil"), 1);
  for (Eigen::Index r = 0; r < encoded.n_rows(); ++r) {
    EXPECT_EQ(encoded.value(r, 0), *codebook.code(encoded.entity_label(r)));
  }
  const auto [again, codebook2] = encode_entities(encoded);
  EXPECT_EQ(again.values(), encoded.values());
  EXPECT_EQ(codebook2.names(), codebook.names());
}

TEST(EncodeEntities, SingletonAndOrderIndependence) {
  const auto single = encode_entities(table_from_text("Country,Year,Economic Freedom\nZ,1,1\n", kPanel));
  EXPECT_EQ(*single.second.code("Z"), 0);
  const auto a = encode_entities(table_from_text("Country,Year,Economic Freedom\nC,1,1\nA,1,2\nB,1,3\n", kPanel));
  const auto b = encode_entities(table_from_text("Country,Year,Economic Freedom\nB,1,3\nC,1,1\nA,1,2\n", kPanel));
  EXPECT_EQ(a.second.names(), b.second.names());
}

TEST(Split, SizesAndPartition) {
  const auto s = split_indices(10, SplitSpec{0.8, 1});
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.test.size(), 2u);

  const auto big = split_indices(1000, SplitSpec{0.8, 7});
  std::set<Eigen::Index> train(big.train.begin(), big.train.end());
  std::set<Eigen::Index> all = train;
  for (const auto r : big.test) {
    EXPECT_FALSE(train.count(r));
    all.insert(r);
  }
  EXPECT_EQ(all.size(), 1000u);
  EXPECT_EQ(train.size(), 800u);
}

TEST(Split, DeterministicUnderSeed) {
  const auto a = split_indices(50, SplitSpec{0.8, 3});
  const auto b = split_indices(50, SplitSpec{0.8, 3});
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_THROW(split_indices(1, SplitSpec{}), std::invalid_argument);
  EXPECT_THROW(split_indices(10, SplitSpec{1.0, 0}), std::invalid_argument);
}

TEST(DiffAll, SampleFixtures) {
  const DataTable d = diff_all(sample());
  const Eigen::Index target = d.target_column();
  const Eigen::Index syria = row_of(d, "Syria 2012");
  const Eigen::Index brazil = row_of(d, "Brazil 2000");
  ASSERT_GE(syria, 0);
  ASSERT_GE(brazil, 0);
  EXPECT_NEAR(d.value(syria, target), -0.91, 1e-9);
  EXPECT_NEAR(d.value(brazil, target), 1.32, 1e-9);
  EXPECT_EQ(d.n_rows(), 2);  // every other entity has a single row
  EXPECT_NEAR(d.value(syria, d.time_column()), 1.0, 0.0);
  EXPECT_NEAR(d.value(syria, d.column_index("5a_credit_market_reg")), 5.585419 - 6.981081, 1e-12);
}

TEST(DiffAll, ConstantSeriesGivesZeros) {
  const DataTable d = diff_all(table_from_text("Country,Year,Economic Freedom,x\nA,1,5,2\nA,2,5,2\nA,3,5,2\n", kPanel));
  ASSERT_EQ(d.n_rows(), 2);
  EXPECT_EQ(d.value(0, d.column_index("x")), 0.0);
  EXPECT_EQ(d.value(1, d.target_column()), 0.0);
}

TEST(DiffAll, MissingOperandPropagates) {
  const DataTable d = diff_all(table_from_text("Country,Year,Economic Freedom,x\nA,1,5,\nA,2,6,2\n", kPanel));
  EXPECT_TRUE(d.is_missing(0, d.column_index("x")));
  EXPECT_EQ(d.value(0, d.target_column()), 1.0);
}

TEST(DiffAll, RowCountAndTelescoping) {
  Rng rng(11);
  std::string text = "Country,Year,Economic Freedom,x\n";
  std::map<std::string, std::pair<double, double>> first_last;
  int expected_rows = 0;
  for (int e = 0; e < 6; ++e) {
    const int n = static_cast<int>(rng.index(5));
    expected_rows += std::max(n - 1, 0);
    for (int t = 0; t < n; ++t) {
      const double y = rng.normal();
      const std::string name = "E" + std::to_string(e);
      if (t == 0) first_last[name].first = y;
      first_last[name].second = y;
      text += name + "," + std::to_string(2000 + t) + "," + format_double(y) + "," + format_double(rng.normal()) + "\n";
    }
  }
  const DataTable d = diff_all(table_from_text(text, kPanel));
  EXPECT_EQ(d.n_rows(), expected_rows);
  std::map<std::string, double> sums;
  for (Eigen::Index r = 0; r < d.n_rows(); ++r) sums[d.entity_label(r)] += d.value(r, d.target_column());
  for (const auto& [name, sum] : sums) {
    EXPECT_NEAR(sum, first_last[name].second - first_last[name].first, 1e-9);
  }
}

TEST(DiffTargetLag, TargetDifferencedFeaturesLagged) {
  const Schema schema{"Country", "Year", "pop", {}};
  const DataTable d = diff_target_lag_features(
      table_from_text("Country,Year,pop,rate\nA,1,100,5\nA,2,130,6\n", schema));
  ASSERT_EQ(d.n_rows(), 1);
  EXPECT_EQ(d.value(0, d.target_column()), 30);
  EXPECT_EQ(d.value(0, d.column_index("rate")), 5);
}

TEST(DiffTargetLag, ThreeRowsCarryPriorLevels) {
  const Schema schema{"Country", "Year", "pop", {}};
  const DataTable d = diff_target_lag_features(
      table_from_text("Country,Year,pop,rate\nA,1,100,5\nA,2,100,6\nA,3,100,9\n", schema));
  ASSERT_EQ(d.n_rows(), 2);
  EXPECT_EQ(d.value(0, d.column_index("rate")), 5);
  EXPECT_EQ(d.value(1, d.column_index("rate")), 6);
  EXPECT_EQ(d.value(0, d.target_column()), 0);
  EXPECT_EQ(d.value(1, d.target_column()), 0);
}

TEST(Reformat, PeriodColumnLabelsRows) {
  const DataTable d = reformat(sample(), ReformatStrategy::diff_all);
  const auto p = d.find_column(kPeriodColumn);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(d.kind(*p), ColumnKind::categorical);
  const auto names = d.feature_names();
  EXPECT_EQ(std::count(names.begin(), names.end(), kPeriodColumn), 0);
}

TEST(RenameMap, MergesRenamedEntities) {
  const auto dir = testing::scratch_dir("rename");
  {
    std::ofstream out(dir / "map.csv");
    out << "old_name,new_name\nZaire,Congo\n";
  }
  const DataTable t = table_from_text("Country,Year,Economic Freedom\nZaire,1990,3\nCongo,1998,4\n", kPanel);
  const DataTable renamed = apply_rename_map(t, load_rename_map(dir / "map.csv"));
  EXPECT_EQ(renamed.entity_label(0), "Congo");
  EXPECT_EQ(renamed.entity_label(1), "Congo");
  EXPECT_EQ(diff_all(renamed).n_rows(), 1);
}

TEST(WriteCsv, MissingWrittenEmptyAndReloads) {
  const DataTable t = sample();
  const auto dir = testing::scratch_dir("write_csv");
  write_table_csv(dir / "t.csv", t);
  const DataTable back = load_csv(dir / "t.csv", kPanel);
  EXPECT_EQ(back.n_rows(), t.n_rows());
  for (Eigen::Index r = 0; r < t.n_rows(); ++r) {
    for (Eigen::Index c = 0; c < t.n_cols(); ++c) {
      if (t.is_missing(r, c)) {
        EXPECT_TRUE(back.is_missing(r, c));
      } else {
        EXPECT_EQ(back.value(r, c), t.value(r, c));
      }
    }
  }
  const auto doc = read_csv_file(dir / "t.csv");
  EXPECT_EQ(doc.rows[1][4], "");
}

}  // namespace
}  // namespace panellime
