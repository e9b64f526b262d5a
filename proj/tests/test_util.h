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

#ifndef PANELLIME_TESTS_TEST_UTIL_H_
#define PANELLIME_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <string>

#include "panellime/common.h"
#include "panellime/csv.h"
#include "panellime/data_table.h"

namespace panellime::testing {

inline DataTable table_from_text(const std::string& text, const Schema& schema,
                                 RowOrder order = RowOrder::sort_by_key) {
  return table_from_csv(parse_csv(text), schema, order);
}

inline std::filesystem::path source_dir() { return PANELLIME_SOURCE_DIR; }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("panellime_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace panellime::testing

#endif  // PANELLIME_TESTS_TEST_UTIL_H_
