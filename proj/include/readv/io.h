// Copyright 2026 The readv Authors.
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

#ifndef READV_IO_H_
#define READV_IO_H_

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace readv {

std::string read_file(const std::filesystem::path& path);

// Writes through a temporary sibling file and renames it into place, so a
// reader never observes a partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

std::string sha256_hex(std::string_view bytes);

// Calls `fn(value, line_number)` for every non-blank line of a JSON Lines
// document. Line numbers are 1-based. Throws ParseError on a bad line.
void for_each_json_line(
    std::string_view text,
    const std::function<void(const nlohmann::json&, std::size_t)>& fn);

// 1-based line containing byte `offset` of `text`.
std::size_t line_of_offset(std::string_view text, std::size_t offset);

}  // namespace readv

#endif  // READV_IO_H_
