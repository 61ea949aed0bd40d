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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetesim/schema.hpp"

namespace hetesim {

/// A validated relevance path: a chain of relation steps where each
/// step's target type equals the next step's source type. Immutable.
class MetaPath {
 public:
  MetaPath(const Schema& schema, std::vector<RelationRef> steps);

  Index length() const { return static_cast<Index>(steps_.size()); }
  const std::vector<RelationRef>& steps() const { return steps_; }
  const RelationRef& step(Index i) const { return steps_[i]; }

  Index source_type() const { return source_type_; }
  Index target_type() const { return target_type_; }

  bool operator==(const MetaPath& other) const { return steps_ == other.steps_; }

 private:
  std::vector<RelationRef> steps_;
  Index source_type_ = 0;
  Index target_type_ = 0;
};

/// Parses a path string against a schema. Two grammars:
///   - type-name shorthand `A-P-V-C`: legal only when exactly one
///     relation (forward or inverse) connects each consecutive pair;
///   - explicit `rel ( "." rel )*` where each rel is a relation id,
///     optionally suffixed `~` for the inverse, or `I(Type)` which is
///     only valid as a complete single-step path.
MetaPath parse_path(std::string_view text, const Schema& schema);

/// Canonical spelling in the explicit grammar; round-trips via parse_path.
std::string to_string(const Schema& schema, const MetaPath& path);

/// Step list reversed with every step inverted. An involution.
MetaPath reverse(const Schema& schema, const MetaPath& path);

/// True iff path == reverse(path).
bool is_symmetric(const MetaPath& path);

/// Joins two paths; throws NotConcatenable unless p1 ends where p2 starts.
MetaPath concatenate(const Schema& schema, const MetaPath& p1, const MetaPath& p2);

/// The two equal-length halves a pairwise walk meets in the middle of.
///
/// Even length: `left` and `right` are the halves and the meeting space
/// is the node type `middle_type`. Odd length: the middle atomic step is
/// split at its implicit edge-object space E (one E instance per edge of
/// `middle_relation`, ordered by (source index, target index)); `left`
/// and `right` hold the steps before/after that relation and may be
/// empty. E is never materialized as nodes.
struct DecomposedPath {
  std::vector<RelationRef> left;
  std::vector<RelationRef> right;
  std::optional<RelationRef> middle_relation;  // engaged iff length is odd
  Index middle_type = 0;                       // meeting node type (even case)

  bool odd() const { return middle_relation.has_value(); }

  /// Step counts including the implicit half-step on each side for odd
  /// paths; always equal on both sides (= ceil(l / 2)).
  Index left_length() const { return static_cast<Index>(left.size()) + (odd() ? 1 : 0); }
  Index right_length() const { return static_cast<Index>(right.size()) + (odd() ? 1 : 0); }

  /// Steps walked from the target side toward the middle: `right`
  /// reversed with each step inverted.
  std::vector<RelationRef> right_reversed() const;
};

DecomposedPath decompose(const Schema& schema, const MetaPath& path);

}  // namespace hetesim
