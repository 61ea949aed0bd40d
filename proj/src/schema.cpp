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

#include "hetesim/schema.hpp"

#include "hetesim/errors.hpp"

namespace hetesim {

Schema::Schema(std::vector<std::string> type_names, std::vector<RelationDef> relations)
    : type_names_(std::move(type_names)), relations_(std::move(relations)) {
  for (std::size_t i = 0; i < type_names_.size(); ++i) {
    auto [_, inserted] = type_index_.emplace(type_names_[i], static_cast<Index>(i));
    if (!inserted) raise(ErrorKind::InvalidArgument, "duplicate type name: " + type_names_[i]);
  }
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const RelationDef& rel = relations_[i];
    if (!type_index_.contains(rel.source_type))
      raise(ErrorKind::UnknownType, "relation " + rel.id + " source type " + rel.source_type);
    if (!type_index_.contains(rel.target_type))
      raise(ErrorKind::UnknownType, "relation " + rel.id + " target type " + rel.target_type);
    auto [_, inserted] = relation_index_.emplace(rel.id, static_cast<Index>(i));
    if (!inserted) raise(ErrorKind::DuplicateRelation, rel.id);
  }
}

bool Schema::has_type(std::string_view name) const {
  return type_index_.contains(std::string(name));
}

bool Schema::has_relation(std::string_view id) const {
  return relation_index_.contains(std::string(id));
}

Index Schema::type_index(std::string_view name) const {
  auto it = type_index_.find(std::string(name));
  if (it == type_index_.end()) raise(ErrorKind::UnknownType, std::string(name));
  return it->second;
}

Index Schema::relation_index(std::string_view id) const {
  auto it = relation_index_.find(std::string(id));
  if (it == relation_index_.end()) raise(ErrorKind::UnknownRelation, std::string(id));
  return it->second;
}

Index Schema::source_type_of(Index relation) const {
  return type_index(relations_[relation].source_type);
}

Index Schema::target_type_of(Index relation) const {
  return type_index(relations_[relation].target_type);
}

std::vector<Index> Schema::relations_between(Index source, Index target) const {
  std::vector<Index> out;
  for (Index r = 0; r < relation_count(); ++r)
    if (source_type_of(r) == source && target_type_of(r) == target) out.push_back(r);
  return out;
}

Index source_type_of(const Schema& schema, const RelationRef& ref) {
  switch (ref.kind) {
    case RelationRef::Kind::Forward: return schema.source_type_of(ref.index);
    case RelationRef::Kind::Inverse: return schema.target_type_of(ref.index);
    case RelationRef::Kind::SelfLoop: return ref.index;
  }
  raise(ErrorKind::Internal, "bad relation ref");
}

Index target_type_of(const Schema& schema, const RelationRef& ref) {
  switch (ref.kind) {
    case RelationRef::Kind::Forward: return schema.target_type_of(ref.index);
    case RelationRef::Kind::Inverse: return schema.source_type_of(ref.index);
    case RelationRef::Kind::SelfLoop: return ref.index;
  }
  raise(ErrorKind::Internal, "bad relation ref");
}

std::string to_string(const Schema& schema, const RelationRef& ref) {
  switch (ref.kind) {
    case RelationRef::Kind::Forward: return schema.relation(ref.index).id;
    case RelationRef::Kind::Inverse: return schema.relation(ref.index).id + "~";
    case RelationRef::Kind::SelfLoop: return "I(" + schema.type_name(ref.index) + ")";
  }
  raise(ErrorKind::Internal, "bad relation ref");
}

}  // namespace hetesim
