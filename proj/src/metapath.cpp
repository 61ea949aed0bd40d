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

#include "hetesim/metapath.hpp"

#include <algorithm>

#include "hetesim/errors.hpp"

namespace hetesim {

MetaPath::MetaPath(const Schema& schema, std::vector<RelationRef> steps)
    : steps_(std::move(steps)) {
  if (steps_.empty()) raise(ErrorKind::ParseError, "a path needs at least one relation");
  for (std::size_t i = 0; i + 1 < steps_.size(); ++i) {
    if (steps_[i].kind == RelationRef::Kind::SelfLoop ||
        steps_[i + 1].kind == RelationRef::Kind::SelfLoop)
      raise(ErrorKind::ParseError, "self-relation I is only valid as a complete path");
    Index t = target_type_of(schema, steps_[i]);
    Index s = source_type_of(schema, steps_[i + 1]);
    if (t != s)
      raise(ErrorKind::NotConcatenable,
            "step " + std::to_string(i + 1) + " ends at " + schema.type_name(t) +
                " but step " + std::to_string(i + 2) + " starts at " + schema.type_name(s));
  }
  source_type_ = source_type_of(schema, steps_.front());
  target_type_ = target_type_of(schema, steps_.back());
}

namespace {

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

RelationRef parse_step(std::string_view token, const Schema& schema, bool sole_step) {
  if (token.empty()) raise(ErrorKind::ParseError, "empty path step");
  if (token.starts_with("I(") && token.ends_with(")")) {
    if (!sole_step)
      raise(ErrorKind::ParseError, "self-relation I is only valid as a complete path");
    return RelationRef::self_loop(schema.type_index(token.substr(2, token.size() - 3)));
  }
  if (token.ends_with("~"))
    return RelationRef::inverse(schema.relation_index(token.substr(0, token.size() - 1)));
  return RelationRef::forward(schema.relation_index(token));
}

MetaPath parse_explicit(std::string_view text, const Schema& schema) {
  auto tokens = split_on(text, '.');
  std::vector<RelationRef> steps;
  steps.reserve(tokens.size());
  for (auto t : tokens) steps.push_back(parse_step(t, schema, tokens.size() == 1));
  return MetaPath(schema, std::move(steps));
}

MetaPath parse_type_form(const std::vector<std::string_view>& names, const Schema& schema) {
  std::vector<RelationRef> steps;
  steps.reserve(names.size() - 1);
  for (std::size_t i = 0; i + 1 < names.size(); ++i) {
    Index from = schema.type_index(names[i]);
    Index to = schema.type_index(names[i + 1]);
    // Candidates are forward relations from->to plus inverses of to->from.
    std::vector<RelationRef> candidates;
    for (Index r : schema.relations_between(from, to)) candidates.push_back(RelationRef::forward(r));
    for (Index r : schema.relations_between(to, from)) candidates.push_back(RelationRef::inverse(r));
    if (candidates.empty())
      raise(ErrorKind::NotConcatenable, "no relation connects " + std::string(names[i]) +
                                            " to " + std::string(names[i + 1]));
    if (candidates.size() > 1)
      raise(ErrorKind::AmbiguousRelation,
            "more than one relation connects " + std::string(names[i]) + " to " +
                std::string(names[i + 1]) + "; use the explicit relation-id form");
    steps.push_back(candidates.front());
  }
  return MetaPath(schema, std::move(steps));
}

}  // namespace

MetaPath parse_path(std::string_view text, const Schema& schema) {
  if (text.empty()) raise(ErrorKind::ParseError, "empty path");
  if (text.find('.') != std::string_view::npos) return parse_explicit(text, schema);
  auto dash_parts = split_on(text, '-');
  if (dash_parts.size() >= 2 &&
      std::all_of(dash_parts.begin(), dash_parts.end(),
                  [&](std::string_view p) { return schema.has_type(p); }))
    return parse_type_form(dash_parts, schema);
  return parse_explicit(text, schema);
}

std::string to_string(const Schema& schema, const MetaPath& path) {
  std::string out;
  for (Index i = 0; i < path.length(); ++i) {
    if (i) out += '.';
    out += to_string(schema, path.step(i));
  }
  return out;
}

MetaPath reverse(const Schema& schema, const MetaPath& path) {
  std::vector<RelationRef> steps(path.steps().rbegin(), path.steps().rend());
  for (auto& s : steps) s = s.inverted();
  return MetaPath(schema, std::move(steps));
}

bool is_symmetric(const MetaPath& path) {
  const auto& s = path.steps();
  Index l = path.length();
  for (Index i = 0; i < l; ++i)
    if (!(s[i] == s[l - 1 - i].inverted())) return false;
  return true;
}

MetaPath concatenate(const Schema& schema, const MetaPath& p1, const MetaPath& p2) {
  if (p1.target_type() != p2.source_type())
    raise(ErrorKind::NotConcatenable,
          "first path ends at " + schema.type_name(p1.target_type()) +
              ", second starts at " + schema.type_name(p2.source_type()));
  std::vector<RelationRef> steps = p1.steps();
  steps.insert(steps.end(), p2.steps().begin(), p2.steps().end());
  return MetaPath(schema, std::move(steps));
}

std::vector<RelationRef> DecomposedPath::right_reversed() const {
  std::vector<RelationRef> steps(right.rbegin(), right.rend());
  for (auto& s : steps) s = s.inverted();
  return steps;
}

DecomposedPath decompose(const Schema& schema, const MetaPath& path) {
  DecomposedPath d;
  Index l = path.length();
  const auto& steps = path.steps();
  if (l % 2 == 0) {
    Index half = l / 2;
    d.left.assign(steps.begin(), steps.begin() + half);
    d.right.assign(steps.begin() + half, steps.end());
    d.middle_type = target_type_of(schema, steps[half - 1]);
  } else {
    Index mid = (l - 1) / 2;
    d.left.assign(steps.begin(), steps.begin() + mid);
    d.middle_relation = steps[mid];
    d.right.assign(steps.begin() + mid + 1, steps.end());
  }
  return d;
}

}  // namespace hetesim
