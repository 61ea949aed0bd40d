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

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hetesim/sparse.hpp"

namespace hetesim {

/// A directed relation R between two declared object types. The inverse
/// relation is addressable everywhere a relation reference is accepted;
/// it is not stored as a separate definition.
struct RelationDef {
  std::string id;
  std::string source_type;
  std::string target_type;
  bool weighted = false;
};

/// Declared object types plus the directed relations among them: the
/// template every graph and path is validated against.
class Schema {
 public:
  Schema() = default;
  Schema(std::vector<std::string> type_names, std::vector<RelationDef> relations);

  Index type_count() const { return static_cast<Index>(type_names_.size()); }
  Index relation_count() const { return static_cast<Index>(relations_.size()); }

  const std::vector<std::string>& type_names() const { return type_names_; }
  const std::vector<RelationDef>& relations() const { return relations_; }

  const std::string& type_name(Index t) const { return type_names_[t]; }
  const RelationDef& relation(Index r) const { return relations_[r]; }

  bool has_type(std::string_view name) const;
  bool has_relation(std::string_view id) const;

  /// Index lookups; throw UnknownType / UnknownRelation.
  Index type_index(std::string_view name) const;
  Index relation_index(std::string_view id) const;

  Index source_type_of(Index relation) const;
  Index target_type_of(Index relation) const;

  /// Relations with the given (source, target) type pair, forward only.
  std::vector<Index> relations_between(Index source, Index target) const;

 private:
  std::vector<std::string> type_names_;
  std::vector<RelationDef> relations_;
  std::unordered_map<std::string, Index> type_index_;
  std::unordered_map<std::string, Index> relation_index_;
};

/// One step of a relevance path: a schema relation walked forward (R),
/// walked backward (R^-1), or the self-relation I of a type.
struct RelationRef {
  enum class Kind { Forward, Inverse, SelfLoop };

  Kind kind = Kind::Forward;
  Index index = 0;  // relation index, or type index for SelfLoop

  static RelationRef forward(Index relation) { return {Kind::Forward, relation}; }
  static RelationRef inverse(Index relation) { return {Kind::Inverse, relation}; }
  static RelationRef self_loop(Index type) { return {Kind::SelfLoop, type}; }

  RelationRef inverted() const {
    switch (kind) {
      case Kind::Forward: return inverse(index);
      case Kind::Inverse: return forward(index);
      case Kind::SelfLoop: return *this;
    }
    return *this;
  }

  bool operator==(const RelationRef&) const = default;
};

Index source_type_of(const Schema& schema, const RelationRef& ref);
Index target_type_of(const Schema& schema, const RelationRef& ref);

/// Canonical spelling: "R", "R~", or "I(Type)". Round-trips through the
/// path parser.
std::string to_string(const Schema& schema, const RelationRef& ref);

}  // namespace hetesim
