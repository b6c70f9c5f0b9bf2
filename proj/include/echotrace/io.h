// Copyright 2026 The echotrace Authors.
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

#ifndef ECHOTRACE_IO_H_
#define ECHOTRACE_IO_H_

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace echotrace {

// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Calls `fn(line, line_number)` for each line (without the newline); line
// numbers start at 1. Throws IoError when the file cannot be opened.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

double parse_double(std::string_view text);

}  // namespace echotrace

#endif  // ECHOTRACE_IO_H_
