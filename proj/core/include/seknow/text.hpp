/*
 * Copyright 2026 The seknow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace seknow {

/// Lowercases ASCII letters, collapses whitespace runs to one space, trims.
std::string normalize(std::string_view text);

/// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Decodes UTF-8 into code points. Malformed bytes decode as themselves.
std::u32string decode_utf8(std::string_view text);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Reads a whole file; throws Error(kIo) when it cannot be opened.
std::string read_file(const std::string& path);

void write_file(const std::string& path, std::string_view contents);

/// Shortest decimal text that round-trips to the same double.
std::string format_shortest(double value);

/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

}  // namespace seknow
