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

#include "panellime/common.h"

#include <array>
#include <atomic>
#include <charconv>
#include <iostream>

namespace panellime {
namespace {

std::atomic<LogLevel> g_log_level{LogLevel::warning};

}  // namespace

void set_log_level(LogLevel level) { g_log_level.store(level); }

LogLevel log_level() { return g_log_level.load(); }

void log_warning(std::string_view message) {
  if (log_level() >= LogLevel::warning) {
    std::cerr << "warning: " << message << '\n';
  }
}

void log_info(std::string_view message) {
  if (log_level() >= LogLevel::info) {
    std::cerr << "info: " << message << '\n';
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buffer;
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), v);
  return std::string(buffer.data(), result.ptr);
}

}  // namespace panellime
