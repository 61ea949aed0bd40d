/*
 *   Copyright 2026 the hetesim authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace hetesim {

enum class ErrorKind {
  UnknownType,
  UnknownRelation,
  UnknownNode,
  DuplicateNode,
  DuplicateRelation,
  TypeMismatch,
  NonPositiveWeight,
  ParseError,
  AmbiguousRelation,
  NotConcatenable,
  SchemaMismatch,
  AsymmetricPath,
  MissingLabel,
  DegenerateLabels,
  IdSetMismatch,
  DimensionMismatch,
  IoError,
  InvalidArgument,
  Internal,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `kind()` identifies the failed contract so
/// callers (and the CLI exit-code mapping) can dispatch without string
/// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, std::string message) {
  throw Error(kind, std::move(message));
}

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownType: return "unknown type";
    case ErrorKind::UnknownRelation: return "unknown relation";
    case ErrorKind::UnknownNode: return "unknown node";
    case ErrorKind::DuplicateNode: return "duplicate node";
    case ErrorKind::DuplicateRelation: return "duplicate relation";
    case ErrorKind::TypeMismatch: return "type mismatch";
    case ErrorKind::NonPositiveWeight: return "non-positive weight";
    case ErrorKind::ParseError: return "parse error";
    case ErrorKind::AmbiguousRelation: return "ambiguous relation";
    case ErrorKind::NotConcatenable: return "not concatenable";
    case ErrorKind::SchemaMismatch: return "schema mismatch";
    case ErrorKind::AsymmetricPath: return "asymmetric path";
    case ErrorKind::MissingLabel: return "missing label";
    case ErrorKind::DegenerateLabels: return "degenerate labels";
    case ErrorKind::IdSetMismatch: return "id set mismatch";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::IoError: return "io error";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Internal: return "internal error";
  }
  return "error";
}

}  // namespace hetesim
