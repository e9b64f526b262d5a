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

// Entity-by-year panel tables: loading, entity encoding, random splits and
// year-over-year reformatting.

#ifndef PANELLIME_DATA_TABLE_H_
#define PANELLIME_DATA_TABLE_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "panellime/csv.h"

namespace panellime {

enum class ColumnKind { numeric, categorical, entity, time, target };

const char* to_string(ColumnKind kind);

// Column-kind assignment. Header columns not named here are numeric.
struct Schema {
  std::string entity;
  std::string time;
  std::string target;
  std::vector<std::string> categorical;
};

// Name of the label column that the reformatting operations add. It carries
// the original time value of each output row so that a differenced row can
// still be identified ("Syria 2012") after the time column itself has been
// differenced.
inline constexpr const char* kPeriodColumn = "period";

// Column-oriented table backed by a dense matrix. Missing cells are NaN.
// Entity cells hold the integer code of the row's entity label; categorical
// cells hold an index into that column's level list.
//
// The constructor checks that there is exactly one entity, one time and one
// target column. Loading a raw panel establishes the row order, (entity label, time)
// ascending with no duplicate pair; every operation here preserves it.
class DataTable {
 public:
  DataTable(std::vector<std::string> names, std::vector<ColumnKind> kinds,
            Eigen::MatrixXd values, std::vector<std::string> entity_labels,
            std::vector<std::vector<std::string>> levels);

  Eigen::Index n_rows() const { return values_.rows(); }
  Eigen::Index n_cols() const { return values_.cols(); }

  const std::vector<std::string>& column_names() const { return names_; }
  const std::vector<ColumnKind>& column_kinds() const { return kinds_; }
  const std::string& name(Eigen::Index col) const { return names_[col]; }
  ColumnKind kind(Eigen::Index col) const { return kinds_[col]; }

  // Throws std::out_of_range for an unknown name.
  Eigen::Index column_index(const std::string& name) const;
  std::optional<Eigen::Index> find_column(const std::string& name) const;

  Eigen::Index entity_column() const { return entity_col_; }
  Eigen::Index time_column() const { return time_col_; }
  Eigen::Index target_column() const { return target_col_; }

  const Eigen::MatrixXd& values() const { return values_; }
  double value(Eigen::Index row, Eigen::Index col) const { return values_(row, col); }
  bool is_missing(Eigen::Index row, Eigen::Index col) const {
    return std::isnan(values_(row, col));
  }
  std::optional<double> cell(Eigen::Index row, Eigen::Index col) const;

  const std::vector<std::string>& entity_labels() const { return entity_labels_; }
  const std::string& entity_label(Eigen::Index row) const { return entity_labels_[row]; }
  const std::vector<std::string>& levels(Eigen::Index col) const { return levels_[col]; }

  // "<entity> <period>", using the period column when present and the time
  // column otherwise.
  std::string row_label(Eigen::Index row) const;

  // Model inputs: entity, time and numeric columns in table order. The target
  // and categorical (label) columns are excluded.
  std::vector<Eigen::Index> feature_columns() const;
  std::vector<std::string> feature_names() const;
  Eigen::MatrixXd feature_matrix() const;
  Eigen::VectorXd target_vector() const;

  Eigen::Index missing_count() const;

  DataTable select_rows(std::span<const Eigen::Index> rows) const;

  // Same schema and row keys, replaced cells. Entity and time columns must be
  // unchanged.
  DataTable with_values(Eigen::MatrixXd values) const;

 private:
  std::vector<std::string> names_;
  std::vector<ColumnKind> kinds_;
  Eigen::MatrixXd values_;
  std::vector<std::string> entity_labels_;
  std::vector<std::vector<std::string>> levels_;
  Eigen::Index entity_col_ = -1;
  Eigen::Index time_col_ = -1;
  Eigen::Index target_col_ = -1;
};

// Ordered entity name -> code mapping; codes are 0..n-1 in lexicographic
// (byte-wise) name order.
class EntityCodebook {
 public:
  EntityCodebook() = default;
  explicit EntityCodebook(std::vector<std::string> labels);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> code(const std::string& name) const;
  const std::string& name(int code) const { return names_.at(code); }

 private:
  std::vector<std::string> names_;
};

// Missing tokens are the empty string, "N/A" and "NA" (case-insensitive).
bool is_missing_token(std::string_view token);

// sort_by_key orders rows by (entity label, time) and rejects duplicate pairs.
// as_written keeps the file order, for tables produced by reformatting, whose
// time column holds differences.
enum class RowOrder { sort_by_key, as_written };

DataTable table_from_csv(const CsvDocument& doc, const Schema& schema,
                         RowOrder row_order = RowOrder::sort_by_key);
DataTable load_csv(const std::filesystem::path& path, const Schema& schema,
                   RowOrder row_order = RowOrder::sort_by_key);

CsvDocument table_to_csv(const DataTable& table);
void write_table_csv(const std::filesystem::path& path, const DataTable& table);

std::pair<DataTable, EntityCodebook> encode_entities(const DataTable& table);

// Two-column CSV "old_name,new_name" with a header row.
std::map<std::string, std::string> load_rename_map(const std::filesystem::path& path);
DataTable apply_rename_map(const DataTable& table,
                           const std::map<std::string, std::string>& renames);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

// Uniform random partition of 0..n_rows-1 with round(train_fraction * n_rows)
// training rows. Both index lists are ascending.
SplitIndices split_indices(Eigen::Index n_rows, const SplitSpec& spec);
std::pair<DataTable, DataTable> split(const DataTable& table, const SplitSpec& spec);

enum class ReformatStrategy { diff_all, diff_target_lag };

const char* to_string(ReformatStrategy strategy);
ReformatStrategy parse_reformat_strategy(std::string_view name);

// Every non-entity numeric column becomes current minus previous within the
// same entity. The first row of each entity is dropped.
DataTable diff_all(const DataTable& table);

// The target becomes current minus previous; every other feature column
// takes the previous row's level. The first row of each entity is dropped.
DataTable diff_target_lag_features(const DataTable& table);

DataTable reformat(const DataTable& table, ReformatStrategy strategy);

// Drops rows with a missing cell in any feature column or the target.
DataTable drop_incomplete_rows(const DataTable& table);

}  // namespace panellime

#endif  // PANELLIME_DATA_TABLE_H_
