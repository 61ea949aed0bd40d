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

#include "hetesim/graph.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hetesim/errors.hpp"
#include "hetesim/rng.hpp"

namespace hetesim {

void ProbMatrix::check_sub_stochastic() const {
  auto sums = matrix.row_sums();
  for (double s : sums)
    if (s > 1.0 + 1e-9) raise(ErrorKind::Internal, "probability row sum exceeds 1: " + std::to_string(s));
  for (double v : matrix.values())
    if (v < 0.0) raise(ErrorKind::Internal, "negative probability entry");
}

Index HinGraph::node_index(Index type, std::string_view id) const {
  auto found = find_node(type, id);
  if (!found) {
    if (!types_containing(id).empty())
      raise(ErrorKind::TypeMismatch,
            std::string(id) + " is not of type " + schema_.type_name(type));
    raise(ErrorKind::UnknownNode,
          std::string(id) + " (type " + schema_.type_name(type) + ")");
  }
  return *found;
}

std::optional<Index> HinGraph::find_node(Index type, std::string_view id) const {
  const auto& map = node_index_[type];
  auto it = map.find(std::string(id));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

std::vector<Index> HinGraph::types_containing(std::string_view id) const {
  std::vector<Index> out;
  for (Index t = 0; t < schema_.type_count(); ++t)
    if (find_node(t, id)) out.push_back(t);
  return out;
}

const SparseMatrix& HinGraph::adjacency(const RelationRef& ref) const {
  switch (ref.kind) {
    case RelationRef::Kind::Forward: return adjacency_[ref.index];
    case RelationRef::Kind::Inverse: return adjacency_rev_[ref.index];
    case RelationRef::Kind::SelfLoop:
      return self_loops_[ref.index];
  }
  raise(ErrorKind::Internal, "bad relation ref");
}

const SparseMatrix& HinGraph::adjacency(std::string_view relation_id) const {
  return adjacency(parse_relation_ref(relation_id));
}

ProbMatrix HinGraph::transition_row(const RelationRef& ref) const {
  const SparseMatrix& w = adjacency(ref);
  auto sums = w.row_sums();
  for (double& s : sums) s = s > 0.0 ? 1.0 / s : 0.0;
  return ProbMatrix{w.scaled_rows(sums), source_type_of(schema_, ref),
                    ref.kind == RelationRef::Kind::SelfLoop
                        ? TargetSpace::node_type(ref.index)
                        : TargetSpace::node_type(target_type_of(schema_, ref)),
                    to_string(schema_, ref)};
}

ProbMatrix HinGraph::transition_row(std::string_view relation_id) const {
  return transition_row(parse_relation_ref(relation_id));
}

ProbMatrix HinGraph::transition_col(const RelationRef& ref) const {
  const SparseMatrix& w = adjacency(ref);
  auto sums = w.col_sums();
  for (double& s : sums) s = s > 0.0 ? 1.0 / s : 0.0;
  // Column-normalized W is the transition matrix of the inverse walk,
  // stored in the forward orientation.
  return ProbMatrix{w.scaled_cols(sums), source_type_of(schema_, ref),
                    TargetSpace::node_type(target_type_of(schema_, ref)),
                    to_string(schema_, ref)};
}

ProbMatrix HinGraph::transition_col(std::string_view relation_id) const {
  return transition_col(parse_relation_ref(relation_id));
}

RelationRef HinGraph::parse_relation_ref(std::string_view text) const {
  if (text.starts_with("I(") && text.ends_with(")")) {
    auto name = text.substr(2, text.size() - 3);
    return RelationRef::self_loop(schema_.type_index(name));
  }
  if (text.ends_with("~"))
    return RelationRef::inverse(schema_.relation_index(text.substr(0, text.size() - 1)));
  return RelationRef::forward(schema_.relation_index(text));
}

std::uint64_t HinGraph::content_hash() const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  auto mix_str = [&h](std::string_view s) { h = mix64(h ^ hash_bytes(s)); };
  auto mix_int = [&h](std::uint64_t v) { h = mix64(h ^ v); };
  // Only computation-relevant content is hashed; the RelationDef
  // `weighted` hint is not persisted by the schema TSV format and does
  // not change any matrix.
  for (const auto& t : schema_.type_names()) mix_str(t);
  for (const auto& r : schema_.relations()) {
    mix_str(r.id);
    mix_str(r.source_type);
    mix_str(r.target_type);
  }
  for (const auto& ids : node_ids_) {
    mix_int(ids.size());
    for (const auto& id : ids) mix_str(id);
  }
  for (const auto& w : adjacency_) {
    mix_int(static_cast<std::uint64_t>(w.nnz()));
    for (Index r = 0; r < w.rows(); ++r) {
      auto cols = w.row_cols(r);
      auto vals = w.row_vals(r);
      for (std::size_t i = 0; i < cols.size(); ++i) {
        mix_int(static_cast<std::uint64_t>(r));
        mix_int(static_cast<std::uint64_t>(cols[i]));
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof vals[i]);
        std::memcpy(&bits, &vals[i], sizeof bits);
        mix_int(bits);
      }
    }
  }
  return h;
}

HinGraph build_graph(Schema schema, const std::vector<NodeRecord>& nodes,
                     const std::vector<EdgeRecord>& edges) {
  static std::atomic<std::uint64_t> next_uid{1};

  HinGraph g;
  g.schema_ = std::move(schema);
  g.uid_ = next_uid.fetch_add(1);
  g.node_ids_.resize(g.schema_.type_count());
  g.node_index_.resize(g.schema_.type_count());

  // Internal indices follow first appearance in the node list.
  for (const NodeRecord& n : nodes) {
    Index t = g.schema_.type_index(n.type_name);
    auto [it, inserted] =
        g.node_index_[t].emplace(n.id, static_cast<Index>(g.node_ids_[t].size()));
    if (!inserted) raise(ErrorKind::DuplicateNode, n.id + " in type " + n.type_name);
    g.node_ids_[t].push_back(n.id);
  }

  std::vector<std::vector<Coo>> triplets(g.schema_.relation_count());
  for (const EdgeRecord& e : edges) {
    Index r = g.schema_.relation_index(e.relation_id);
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      raise(ErrorKind::NonPositiveWeight,
            "edge " + e.src_id + " -> " + e.dst_id + " (" + e.relation_id + ")");
    Index st = g.schema_.source_type_of(r);
    Index tt = g.schema_.target_type_of(r);
    auto src = g.find_node(st, e.src_id);
    auto dst = g.find_node(tt, e.dst_id);
    if (!src) {
      if (!g.types_containing(e.src_id).empty())
        raise(ErrorKind::TypeMismatch, "edge source " + e.src_id + " is not of type " +
                                           g.schema_.type_name(st) + " required by " + e.relation_id);
      raise(ErrorKind::UnknownNode, e.src_id);
    }
    if (!dst) {
      if (!g.types_containing(e.dst_id).empty())
        raise(ErrorKind::TypeMismatch, "edge target " + e.dst_id + " is not of type " +
                                           g.schema_.type_name(tt) + " required by " + e.relation_id);
      raise(ErrorKind::UnknownNode, e.dst_id);
    }
    triplets[r].push_back({*src, *dst, e.weight});
  }

  for (Index t = 0; t < g.schema_.type_count(); ++t)
    g.self_loops_.push_back(g.identity_for_type(t));
  g.adjacency_.reserve(g.schema_.relation_count());
  g.adjacency_rev_.reserve(g.schema_.relation_count());
  for (Index r = 0; r < g.schema_.relation_count(); ++r) {
    Index sn = g.node_count(g.schema_.source_type_of(r));
    Index tn = g.node_count(g.schema_.target_type_of(r));
    g.adjacency_.push_back(SparseMatrix::from_coo(sn, tn, std::move(triplets[r])));
    g.adjacency_rev_.push_back(g.adjacency_.back().transposed());
  }
  return g;
}

// --- TSV parsing ---------------------------------------------------------

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool skip_line(std::string_view line) {
  return line.empty() || line[0] == '#';
}

[[noreturn]] void line_error(ErrorKind kind, std::size_t line_no, const std::string& what) {
  raise(kind, "line " + std::to_string(line_no) + ": " + what);
}

std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  return line;
}

double parse_weight(std::string_view text, std::size_t line_no) {
  double w = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), w);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    line_error(ErrorKind::ParseError, line_no, "bad weight '" + std::string(text) + "'");
  return w;
}

}  // namespace

Schema read_schema_tsv(std::istream& in) {
  std::vector<std::string> types;
  std::vector<RelationDef> rels;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = chomp(raw);
    if (skip_line(line)) continue;
    auto f = split_tabs(line);
    if (f[0] == "TYPE" && f.size() == 2) {
      types.emplace_back(f[1]);
    } else if (f[0] == "REL" && f.size() == 4) {
      rels.push_back({std::string(f[1]), std::string(f[2]), std::string(f[3]), false});
    } else {
      line_error(ErrorKind::ParseError, line_no, "expected TYPE or REL record");
    }
  }
  return Schema(std::move(types), std::move(rels));
}

std::vector<NodeRecord> read_nodes_tsv(std::istream& in) {
  std::vector<NodeRecord> nodes;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = chomp(raw);
    if (skip_line(line)) continue;
    auto f = split_tabs(line);
    if (f.size() != 2 || f[0].empty() || f[1].empty())
      line_error(ErrorKind::ParseError, line_no, "expected id<TAB>type");
    nodes.push_back({std::string(f[0]), std::string(f[1])});
  }
  return nodes;
}

std::vector<EdgeRecord> read_edges_tsv(std::istream& in) {
  std::vector<EdgeRecord> edges;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = chomp(raw);
    if (skip_line(line)) continue;
    auto f = split_tabs(line);
    if (f.size() != 3 && f.size() != 4)
      line_error(ErrorKind::ParseError, line_no, "expected src<TAB>dst<TAB>rel[<TAB>weight]");
    EdgeRecord e{std::string(f[0]), std::string(f[1]), std::string(f[2]), 1.0};
    if (f.size() == 4) e.weight = parse_weight(f[3], line_no);
    edges.push_back(std::move(e));
  }
  return edges;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open " + path);
  return in;
}

}  // namespace

Schema load_schema_file(const std::string& path) {
  auto in = open_input(path);
  return read_schema_tsv(in);
}

std::vector<NodeRecord> load_nodes_file(const std::string& path) {
  auto in = open_input(path);
  return read_nodes_tsv(in);
}

std::vector<EdgeRecord> load_edges_file(const std::string& path) {
  auto in = open_input(path);
  return read_edges_tsv(in);
}

HinGraph load_graph_files(const std::string& schema_path, const std::string& nodes_path,
                          const std::string& edges_path) {
  return build_graph(load_schema_file(schema_path), load_nodes_file(nodes_path),
                     load_edges_file(edges_path));
}

void write_schema_tsv(std::ostream& out, const Schema& schema) {
  for (const auto& t : schema.type_names()) out << "TYPE\t" << t << "\n";
  for (const auto& r : schema.relations())
    out << "REL\t" << r.id << "\t" << r.source_type << "\t" << r.target_type << "\n";
}

void write_nodes_tsv(std::ostream& out, const HinGraph& graph) {
  const Schema& s = graph.schema();
  for (Index t = 0; t < s.type_count(); ++t)
    for (const auto& id : graph.node_ids(t)) out << id << "\t" << s.type_name(t) << "\n";
}

void write_edges_tsv(std::ostream& out, const HinGraph& graph) {
  const Schema& s = graph.schema();
  for (Index r = 0; r < s.relation_count(); ++r) {
    const SparseMatrix& w = graph.adjacency(RelationRef::forward(r));
    const auto& src_ids = graph.node_ids(s.source_type_of(r));
    const auto& dst_ids = graph.node_ids(s.target_type_of(r));
    for (Index i = 0; i < w.rows(); ++i) {
      auto cols = w.row_cols(i);
      auto vals = w.row_vals(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        out << src_ids[i] << "\t" << dst_ids[cols[k]] << "\t" << s.relation(r).id;
        if (vals[k] != 1.0) {
          // Shortest representation that round-trips the double exactly,
          // so re-ingesting reproduces the adjacency bit for bit.
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.17g", vals[k]);
          out << "\t" << buf;
        }
        out << "\n";
      }
    }
  }
}

std::string format_value_12sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_matrix_coo(std::ostream& out, const SparseMatrix& m,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& col_ids,
                      const std::vector<std::string>& header_lines) {
  for (const auto& h : header_lines) out << "# " << h << "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_vals(r);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out << row_ids[r] << "\t" << col_ids[cols[k]] << "\t" << format_value_12sig(vals[k])
          << "\n";
  }
}

CooFile read_matrix_coo(std::istream& in, const std::vector<std::string>* row_ids,
                        const std::vector<std::string>* col_ids) {
  CooFile file;
  std::unordered_map<std::string, Index> row_map, col_map;
  auto intern = [](std::unordered_map<std::string, Index>& map, std::vector<std::string>& ids,
                   std::string_view id) {
    auto [it, inserted] = map.emplace(std::string(id), static_cast<Index>(ids.size()));
    if (inserted) ids.emplace_back(id);
    return it->second;
  };
  if (row_ids) {
    file.row_ids = *row_ids;
    for (std::size_t i = 0; i < file.row_ids.size(); ++i)
      row_map.emplace(file.row_ids[i], static_cast<Index>(i));
  }
  if (col_ids) {
    file.col_ids = *col_ids;
    for (std::size_t i = 0; i < file.col_ids.size(); ++i)
      col_map.emplace(file.col_ids[i], static_cast<Index>(i));
  }

  std::vector<Coo> entries;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = chomp(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view body = line;
      body.remove_prefix(body.size() > 1 && body[1] == ' ' ? 2 : 1);
      file.header_lines.emplace_back(body);
      continue;
    }
    auto f = split_tabs(line);
    if (f.size() != 3) line_error(ErrorKind::ParseError, line_no, "expected row<TAB>col<TAB>value");
    Index r, c;
    if (row_ids) {
      auto it = row_map.find(std::string(f[0]));
      if (it == row_map.end()) line_error(ErrorKind::UnknownNode, line_no, std::string(f[0]));
      r = it->second;
    } else {
      r = intern(row_map, file.row_ids, f[0]);
    }
    if (col_ids) {
      auto it = col_map.find(std::string(f[1]));
      if (it == col_map.end()) line_error(ErrorKind::UnknownNode, line_no, std::string(f[1]));
      c = it->second;
    } else {
      c = intern(col_map, file.col_ids, f[1]);
    }
    entries.push_back({r, c, parse_weight(f[2], line_no)});
  }
  file.matrix = SparseMatrix::from_coo(static_cast<Index>(file.row_ids.size()),
                                       static_cast<Index>(file.col_ids.size()), std::move(entries));
  return file;
}

}  // namespace hetesim
