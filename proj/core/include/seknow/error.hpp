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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seknow {

/// Error categories. The CLI prints them as `error: <kind>: <detail>`.
enum class ErrorKind {
  kLoad,
  kFusion,
  kDomainNotFound,
  kParse,
  kLabel,
  kQuery,
  kEmptyTopic,
  kConfiguration,
  kIndexing,
  kNoCandidates,
  kTemplate,
  kOracle,
  kCorruption,
  kMetric,
  kEvaluation,
  kGoal,
  kAlignment,
  kGeneration,
  kIo,
  kUsage,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Belief-span parse failure; `offset` is the byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& detail)
      : Error(ErrorKind::kParse,
              "at byte " + std::to_string(offset) + ": " + detail),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace seknow
