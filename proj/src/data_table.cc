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
#include <cctype>
#include <charconv>
#include <numeric>
#include <set>
#include <stdexcept>

#include "panellime/common.h"

namespace panellime {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), v);
  if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
    return std::nullopt;
  }
  return v;
}

bool is_feature_kind(ColumnKind k) {
  return k == ColumnKind::entity || k == ColumnKind::time || k == ColumnKind::numeric;
}

// Reorders rows by (entity label, time), rejects duplicate keys and assigns
// lexicographic entity codes.
DataTable build_sorted(std::vector<std::string> names, std::vector<ColumnKind> kinds,
                       const Eigen::MatrixXd& values, const std::vector<std::string>& labels,
                       std::vector<std::vector<std::string>> levels, RowOrder row_order) {
  const auto time_it = std::find(kinds.begin(), kinds.end(), ColumnKind::time);
  const auto entity_it = std::find(kinds.begin(), kinds.end(), ColumnKind::entity);
  if (time_it == kinds.end() || entity_it == kinds.end()) {
    throw std::invalid_argument("table needs an entity and a time column");
  }
  const Eigen::Index time_col = time_it - kinds.begin();
  const Eigen::Index entity_col = entity_it - kinds.begin();

  std::vector<Eigen::Index> order(values.rows());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (row_order == RowOrder::sort_by_key) {
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      if (labels[a] != labels[b]) return labels[a] < labels[b];
      return values(a, time_col) < values(b, time_col);
    });
  }
  for (std::size_t i = 1; i < order.size() && row_order == RowOrder::sort_by_key; ++i) {
    const Eigen::Index a = order[i - 1], b = order[i];
    if (labels[a] == labels[b] && values(a, time_col) == values(b, time_col)) {
      throw DataError("duplicate (entity, time) pair: (" + labels[a] + ", " +
                      format_double(values(a, time_col)) + ")");
    }
  }

  const EntityCodebook codebook(labels);
  Eigen::MatrixXd sorted(values.rows(), values.cols());
  std::vector<std::string> sorted_labels(values.rows());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    sorted.row(i) = values.row(order[i]);
    sorted_labels[i] = labels[order[i]];
    sorted(i, entity_col) = *codebook.code(sorted_labels[i]);
  }
  return DataTable(std::move(names), std::move(kinds), std::move(sorted),
                   std::move(sorted_labels), std::move(levels));
}

// Contiguous [begin, end) row ranges sharing an entity label.
std::vector<std::pair<Eigen::Index, Eigen::Index>> entity_blocks(const DataTable& table) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
  Eigen::Index begin = 0;
  for (Eigen::Index r = 1; r <= table.n_rows(); ++r) {
    if (r == table.n_rows() || table.entity_label(r) != table.entity_label(begin)) {
      blocks.emplace_back(begin, r);
      begin = r;
    }
  }
  if (table.n_rows() == 0) blocks.clear();
  return blocks;
}

enum class FeatureRule { difference, previous_level };

// Shared driver for both reformatting strategies. `feature_rule` applies to
// non-target time/numeric columns; the target is always differenced.
DataTable reformat_pairs(const DataTable& table, FeatureRule feature_rule) {
  for (Eigen::Index c = 0; c < table.n_cols(); ++c) {
    if (table.kind(c) == ColumnKind::categorical && table.name(c) != kPeriodColumn) {
      log_warning("reformat: categorical column '" + table.name(c) +
                  "' is carried from the current row");
    }
  }
  std::vector<std::string> names = table.column_names();
  std::vector<ColumnKind> kinds = table.column_kinds();
  std::vector<std::vector<std::string>> levels;
  for (Eigen::Index c = 0; c < table.n_cols(); ++c) levels.push_back(table.levels(c));

  const auto existing_period = table.find_column(kPeriodColumn);
  const bool add_period = !existing_period.has_value();
  Eigen::Index period_col = existing_period.value_or(table.n_cols());
  if (add_period) {
    names.emplace_back(kPeriodColumn);
    kinds.push_back(ColumnKind::categorical);
    levels.emplace_back();
  }

  const auto blocks = entity_blocks(table);
  Eigen::Index n_out = 0;
  Eigen::Index singletons = 0;
  for (const auto& [b, e] : blocks) {
    n_out += std::max<Eigen::Index>(e - b - 1, 0);
    if (e - b == 1) ++singletons;
  }
  if (singletons > 0) {
    log_warning("reformat: " + std::to_string(singletons) +
                " entities with a single row contribute no output rows");
  }

  std::vector<std::string> period_text;
  if (add_period) {
    std::set<std::string> unique;
    for (Eigen::Index r = 0; r < table.n_rows(); ++r) {
      unique.insert(format_double(table.value(r, table.time_column())));
    }
    period_text.assign(unique.begin(), unique.end());
    levels[period_col] = period_text;
  }

  const Eigen::Index n_cols = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd out(n_out, n_cols);
  std::vector<std::string> labels;
  labels.reserve(n_out);
  Eigen::Index o = 0;
  for (const auto& [b, e] : blocks) {
    for (Eigen::Index r = b + 1; r < e; ++r, ++o) {
      labels.push_back(table.entity_label(r));
      for (Eigen::Index c = 0; c < table.n_cols(); ++c) {
        const double cur = table.value(r, c);
        const double prev = table.value(r - 1, c);
        switch (table.kind(c)) {
          case ColumnKind::entity:
          case ColumnKind::categorical:
            out(o, c) = cur;
            break;
          case ColumnKind::target:
            out(o, c) = cur - prev;
            break;
          case ColumnKind::time:
          case ColumnKind::numeric:
            out(o, c) = feature_rule == FeatureRule::difference ? cur - prev : prev;
            break;
        }
      }
      if (add_period) {
        const std::string text = format_double(table.value(r, table.time_column()));
        const auto it = std::lower_bound(period_text.begin(), period_text.end(), text);
        out(o, period_col) = static_cast<double>(it - period_text.begin());
      }
    }
  }
  return DataTable(std::move(names), std::move(kinds), std::move(out), std::move(labels),
                   std::move(levels));
}

}  // namespace

const char* to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::entity: return "entity";
    case ColumnKind::time: return "time";
    case ColumnKind::target: return "target";
  }
  return "unknown";
}

DataTable::DataTable(std::vector<std::string> names, std::vector<ColumnKind> kinds,
                     Eigen::MatrixXd values, std::vector<std::string> entity_labels,
                     std::vector<std::vector<std::string>> levels)
    : names_(std::move(names)),
      kinds_(std::move(kinds)),
      values_(std::move(values)),
      entity_labels_(std::move(entity_labels)),
      levels_(std::move(levels)) {
  const auto n_cols = static_cast<std::size_t>(values_.cols());
  if (names_.size() != n_cols || kinds_.size() != n_cols || levels_.size() != n_cols) {
    throw std::invalid_argument("DataTable: column metadata does not match cell grid");
  }
  if (entity_labels_.size() != static_cast<std::size_t>(values_.rows())) {
    throw std::invalid_argument("DataTable: one entity label per row required");
  }
  for (std::size_t c = 0; c < n_cols; ++c) {
    Eigen::Index* slot = nullptr;
    switch (kinds_[c]) {
      case ColumnKind::entity: slot = &entity_col_; break;
      case ColumnKind::time: slot = &time_col_; break;
      case ColumnKind::target: slot = &target_col_; break;
      default: break;
    }
    if (slot != nullptr) {
      if (*slot >= 0) {
        throw std::invalid_argument(std::string("DataTable: more than one ") +
                                    to_string(kinds_[c]) + " column");
      }
      *slot = static_cast<Eigen::Index>(c);
    }
  }
  if (entity_col_ < 0 || time_col_ < 0 || target_col_ < 0) {
    throw std::invalid_argument("DataTable: entity, time and target columns are required");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw std::invalid_argument("DataTable: duplicate column " + n);
  }
}

Eigen::Index DataTable::column_index(const std::string& name) const {
  const auto c = find_column(name);
  if (!c) throw std::out_of_range("unknown column: " + name);
  return *c;
}

std::optional<Eigen::Index> DataTable::find_column(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - names_.begin());
}

std::optional<double> DataTable::cell(Eigen::Index row, Eigen::Index col) const {
  if (is_missing(row, col)) return std::nullopt;
  return values_(row, col);
}

std::string DataTable::row_label(Eigen::Index row) const {
  if (const auto p = find_column(kPeriodColumn);
      p && kinds_[*p] == ColumnKind::categorical && !is_missing(row, *p)) {
    return entity_labels_[row] + " " + levels_[*p][static_cast<std::size_t>(values_(row, *p))];
  }
  return entity_labels_[row] + " " + format_double(values_(row, time_col_));
}

std::vector<Eigen::Index> DataTable::feature_columns() const {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index c = 0; c < n_cols(); ++c) {
    if (is_feature_kind(kinds_[c])) cols.push_back(c);
  }
  return cols;
}

std::vector<std::string> DataTable::feature_names() const {
  std::vector<std::string> out;
  for (const auto c : feature_columns()) out.push_back(names_[c]);
  return out;
}

Eigen::MatrixXd DataTable::feature_matrix() const {
  const auto cols = feature_columns();
  Eigen::MatrixXd x(n_rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) x.col(j) = values_.col(cols[j]);
  return x;
}

Eigen::VectorXd DataTable::target_vector() const { return values_.col(target_col_); }

Eigen::Index DataTable::missing_count() const { return values_.array().isNaN().count(); }

DataTable DataTable::select_rows(std::span<const Eigen::Index> rows) const {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(rows.size()), n_cols());
  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= n_rows()) throw std::out_of_range("select_rows: bad row index");
    v.row(static_cast<Eigen::Index>(i)) = values_.row(rows[i]);
    labels.push_back(entity_labels_[rows[i]]);
  }
  return DataTable(names_, kinds_, std::move(v), std::move(labels), levels_);
}

DataTable DataTable::with_values(Eigen::MatrixXd values) const {
  if (values.rows() != n_rows() || values.cols() != n_cols()) {
    throw std::invalid_argument("with_values: shape mismatch");
  }
  if (values.col(entity_col_) != values_.col(entity_col_) ||
      values.col(time_col_) != values_.col(time_col_)) {
    throw std::invalid_argument("with_values: entity and time columns must be unchanged");
  }
  return DataTable(names_, kinds_, std::move(values), entity_labels_, levels_);
}

EntityCodebook::EntityCodebook(std::vector<std::string> labels) : names_(std::move(labels)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
}

std::optional<int> EntityCodebook::code(const std::string& name) const {
  const auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

bool is_missing_token(std::string_view token) {
  token = trim(token);
  if (token.empty()) return true;
  auto upper = [](std::string_view s) {
    std::string u(s);
    for (auto& ch : u) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return u;
  };
  const std::string u = upper(token);
  return u == "N/A" || u == "NA";
}

DataTable table_from_csv(const CsvDocument& doc, const Schema& schema, RowOrder row_order) {
  const auto& header = doc.header;
  auto locate = [&](const std::string& name, const char* role) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (name.empty() || it == header.end()) {
      throw DataError(std::string("schema ") + role + " column '" + name + "' not in header");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<ColumnKind> kinds(header.size(), ColumnKind::numeric);
  auto assign = [&](std::size_t c, ColumnKind k) {
    if (kinds[c] != ColumnKind::numeric) {
      throw DataError("column '" + header[c] + "' assigned two kinds");
    }
    kinds[c] = k;
  };
  const std::size_t entity_col = locate(schema.entity, "entity");
  assign(entity_col, ColumnKind::entity);
  assign(locate(schema.time, "time"), ColumnKind::time);
  assign(locate(schema.target, "target"), ColumnKind::target);
  for (const auto& name : schema.categorical) assign(locate(name, "categorical"), ColumnKind::categorical);

  const std::size_t n_cols = header.size();
  const Eigen::Index n_rows = static_cast<Eigen::Index>(doc.rows.size());
  std::vector<std::vector<std::string>> levels(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (kinds[c] != ColumnKind::categorical) continue;
    std::set<std::string> unique;
    for (const auto& row : doc.rows) {
      if (!is_missing_token(row[c])) unique.insert(std::string(trim(row[c])));
    }
    levels[c].assign(unique.begin(), unique.end());
  }

  Eigen::MatrixXd values(n_rows, static_cast<Eigen::Index>(n_cols));
  std::vector<std::string> labels(n_rows);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& row = doc.rows[r];
    for (std::size_t c = 0; c < n_cols; ++c) {
      const std::string_view token = row[c];
      switch (kinds[c]) {
        case ColumnKind::entity:
          if (is_missing_token(token)) {
            throw DataError("row " + std::to_string(r + 1) + ": missing entity name");
          }
          labels[r] = std::string(trim(token));
          values(r, c) = 0.0;
          break;
        case ColumnKind::categorical:
          if (is_missing_token(token)) {
            values(r, c) = kMissing;
          } else {
            const auto it = std::lower_bound(levels[c].begin(), levels[c].end(), trim(token));
            values(r, c) = static_cast<double>(it - levels[c].begin());
          }
          break;
        default: {
          if (is_missing_token(token)) {
            if (kinds[c] == ColumnKind::time) {
              throw DataError("row " + std::to_string(r + 1) + ": missing time value");
            }
            values(r, c) = kMissing;
            break;
          }
          const auto v = parse_number(token);
          if (!v) {
            throw DataError("row " + std::to_string(r + 1) + ", column '" + header[c] +
                            "': non-numeric token '" + std::string(token) + "'");
          }
          values(r, c) = *v;
        }
      }
    }
  }
  return build_sorted(header, std::move(kinds), values, labels, std::move(levels), row_order);
}

DataTable load_csv(const std::filesystem::path& path, const Schema& schema, RowOrder row_order) {
  return table_from_csv(read_csv_file(path), schema, row_order);
}

CsvDocument table_to_csv(const DataTable& table) {
  CsvDocument doc;
  doc.header = table.column_names();
  doc.rows.reserve(table.n_rows());
  for (Eigen::Index r = 0; r < table.n_rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(table.n_cols());
    for (Eigen::Index c = 0; c < table.n_cols(); ++c) {
      if (table.kind(c) == ColumnKind::entity) {
        row.push_back(table.entity_label(r));
      } else if (table.is_missing(r, c)) {
        row.emplace_back();
      } else if (table.kind(c) == ColumnKind::categorical) {
        row.push_back(table.levels(c)[static_cast<std::size_t>(table.value(r, c))]);
      } else {
        row.push_back(format_double(table.value(r, c)));
      }
    }
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

void write_table_csv(const std::filesystem::path& path, const DataTable& table) {
  write_csv_file(path, table_to_csv(table));
}

std::pair<DataTable, EntityCodebook> encode_entities(const DataTable& table) {
  EntityCodebook codebook(table.entity_labels());
  Eigen::MatrixXd values = table.values();
  for (Eigen::Index r = 0; r < table.n_rows(); ++r) {
    values(r, table.entity_column()) = *codebook.code(table.entity_label(r));
  }
  std::vector<std::vector<std::string>> levels;
  for (Eigen::Index c = 0; c < table.n_cols(); ++c) levels.push_back(table.levels(c));
  DataTable encoded(table.column_names(), table.column_kinds(), std::move(values),
                    table.entity_labels(), std::move(levels));
  return {std::move(encoded), std::move(codebook)};
}

std::map<std::string, std::string> load_rename_map(const std::filesystem::path& path) {
  const CsvDocument doc = read_csv_file(path);
  if (doc.header.size() != 2) throw DataError("rename map must have two columns");
  std::map<std::string, std::string> renames;
  for (const auto& row : doc.rows) {
    const std::string from(trim(row[0]));
    const std::string to(trim(row[1]));
    if (from.empty() || to.empty()) throw DataError("rename map: empty name");
    if (!renames.emplace(from, to).second) throw DataError("rename map: '" + from + "' listed twice");
  }
  return renames;
}

DataTable apply_rename_map(const DataTable& table,
                           const std::map<std::string, std::string>& renames) {
  std::vector<std::string> labels = table.entity_labels();
  for (auto& l : labels) {
    if (const auto it = renames.find(l); it != renames.end()) l = it->second;
  }
  std::vector<std::vector<std::string>> levels;
  for (Eigen::Index c = 0; c < table.n_cols(); ++c) levels.push_back(table.levels(c));
  return build_sorted(table.column_names(), table.column_kinds(), table.values(), labels,
                      std::move(levels), RowOrder::sort_by_key);
}

SplitIndices split_indices(Eigen::Index n_rows, const SplitSpec& spec) {
  if (n_rows < 2) throw std::invalid_argument("split: at least two rows required");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw std::invalid_argument("split: train_fraction must lie in (0, 1)");
  }
  std::vector<Eigen::Index> order(n_rows);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(spec.seed);
  rng.shuffle(order);
  const auto n_train =
      static_cast<std::ptrdiff_t>(std::llround(spec.train_fraction * static_cast<double>(n_rows)));
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.test.assign(order.begin() + n_train, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<DataTable, DataTable> split(const DataTable& table, const SplitSpec& spec) {
  const SplitIndices idx = split_indices(table.n_rows(), spec);
  return {table.select_rows(idx.train), table.select_rows(idx.test)};
}

const char* to_string(ReformatStrategy strategy) {
  return strategy == ReformatStrategy::diff_all ? "diff_all" : "diff_target_lag";
}

ReformatStrategy parse_reformat_strategy(std::string_view name) {
  if (name == "diff_all") return ReformatStrategy::diff_all;
  if (name == "diff_target_lag") return ReformatStrategy::diff_target_lag;
  throw std::invalid_argument("unknown reformat strategy: " + std::string(name));
}

DataTable diff_all(const DataTable& table) {
  return reformat_pairs(table, FeatureRule::difference);
}

DataTable diff_target_lag_features(const DataTable& table) {
  return reformat_pairs(table, FeatureRule::previous_level);
}

DataTable reformat(const DataTable& table, ReformatStrategy strategy) {
  return strategy == ReformatStrategy::diff_all ? diff_all(table)
                                                : diff_target_lag_features(table);
}

DataTable drop_incomplete_rows(const DataTable& table) {
  auto cols = table.feature_columns();
  cols.push_back(table.target_column());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < table.n_rows(); ++r) {
    const bool complete = std::none_of(cols.begin(), cols.end(),
                                       [&](Eigen::Index c) { return table.is_missing(r, c); });
    if (complete) keep.push_back(r);
  }
  return table.select_rows(keep);
}

}  // namespace panellime
