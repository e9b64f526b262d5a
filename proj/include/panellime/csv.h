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

// RFC 4180 reading and writing of comma-separated text.

#ifndef PANELLIME_CSV_H_
#define PANELLIME_CSV_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace panellime {

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Parses quoted fields (with "" escapes and embedded line breaks), CRLF or LF
// record separators and an optional UTF-8 byte order mark. The first record
// is the header; every other record must have the same number of fields.
CsvDocument parse_csv(std::string_view text);

CsvDocument read_csv_file(const std::filesystem::path& path);

// Fields containing a comma, quote or line break are quoted.
void write_csv(std::ostream& out, const CsvDocument& doc);

void write_csv_file(const std::filesystem::path& path, const CsvDocument& doc);

}  // namespace panellime

#endif  // PANELLIME_CSV_H_
