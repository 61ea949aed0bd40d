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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hetesim/schema.hpp"
#include "hetesim/sparse.hpp"

namespace hetesim {

struct NodeRecord {
  std::string id;
  std::string type_name;
};

struct EdgeRecord {
  std::string src_id;
  std::string dst_id;
  std::string relation_id;
  double weight = 1.0;
};

/// The index space a probability matrix maps into: either a node type or
/// the implicit edge-object space of a relation (one slot per edge
/// instance, ordered by (source index, target index)).
struct TargetSpace {
  enum class Kind { NodeType, EdgeSpace };
  Kind kind = Kind::NodeType;
  Index type = 0;           // node type index (NodeType)
  RelationRef relation{};   // middle relation (EdgeSpace)

  static TargetSpace node_type(Index t) { return {Kind::NodeType, t, {}}; }
  static TargetSpace edge_space(RelationRef r) { return {Kind::EdgeSpace, 0, r}; }
};

/// A sub-stochastic reachable-probability matrix: rows indexed by nodes
/// of `source_type`, columns by `target`. Probability mass lost at
/// dangling nodes stays lost; rows are never renormalized.
struct ProbMatrix {
  SparseMatrix matrix;
  Index source_type = 0;
  TargetSpace target{};
  std::string path;  // canonical path string that generated it

  /// Throws when a row sum exceeds 1 + 1e-9 or a value is negative.
  void check_sub_stochastic() const;
};

/// Immutable typed graph: node id tables per type plus one sparse
/// adjacency matrix per relation. Safe for concurrent reads once built.
class HinGraph {
 public:
  HinGraph() = default;

  const Schema& schema() const { return schema_; }

  Index node_count(Index type) const { return static_cast<Index>(node_ids_[type].size()); }
  const std::vector<std::string>& node_ids(Index type) const { return node_ids_[type]; }
  const std::string& node_id(Index type, Index i) const { return node_ids_[type][i]; }

  /// Internal index of a node; throws UnknownNode.
  Index node_index(Index type, std::string_view id) const;
  std::optional<Index> find_node(Index type, std::string_view id) const;
  /// Types that contain the id (used for TypeMismatch diagnostics).
  std::vector<Index> types_containing(std::string_view id) const;

  /// W for the relation as walked; the inverse reference yields the
  /// stored transpose, so no transposition happens per call.
  const SparseMatrix& adjacency(const RelationRef& ref) const;
  const SparseMatrix& adjacency(std::string_view relation_id) const;

  /// Row-normalized transition matrix U for the step: each nonzero row
  /// of W divided by its row sum. Zero rows stay zero so downstream
  /// products score dangling nodes 0.
  ProbMatrix transition_row(const RelationRef& ref) const;
  ProbMatrix transition_row(std::string_view relation_id) const;

  /// Column-normalized transition matrix V; equals
  /// transpose(transition_row(ref.inverted())).
  ProbMatrix transition_col(const RelationRef& ref) const;
  ProbMatrix transition_col(std::string_view relation_id) const;

  RelationRef parse_relation_ref(std::string_view text) const;

  /// Content hash over schema, node tables and adjacency structure.
  /// Stable across runs; used for materialization staleness checks.
  std::uint64_t content_hash() const;

  /// Process-unique id for this built graph (cache-key namespace).
  std::uint64_t uid() const { return uid_; }

  friend HinGraph build_graph(Schema schema, const std::vector<NodeRecord>& nodes,
                              const std::vector<EdgeRecord>& edges);

 private:
  SparseMatrix identity_for_type(Index type) const { return SparseMatrix::identity(node_count(type)); }

  Schema schema_;
  std::vector<std::vector<std::string>> node_ids_;                    // per type
  std::vector<std::unordered_map<std::string, Index>> node_index_;    // per type
  std::vector<SparseMatrix> adjacency_;        // per relation, |R.S| x |R.T|
  std::vector<SparseMatrix> adjacency_rev_;    // stored transposes
  std::vector<SparseMatrix> self_loops_;       // identity per type, built eagerly
  std::uint64_t uid_ = 0;
};

/// Validates and assembles a graph. Duplicate edges under the same
/// relation accumulate weight (multigraph semantics).
HinGraph build_graph(Schema schema, const std::vector<NodeRecord>& nodes,
                     const std::vector<EdgeRecord>& edges);

// --- TSV external interfaces -------------------------------------------
//
// Schema file : lines `TYPE<TAB>name` and `REL<TAB>id<TAB>src<TAB>dst`
// Node file   : `external_id<TAB>type_name`
// Edge file   : `src_id<TAB>dst_id<TAB>relation_id[<TAB>weight]`
//
// All parsers skip blank lines and `#` comments and report 1-based line
// numbers on error.

Schema read_schema_tsv(std::istream& in);
std::vector<NodeRecord> read_nodes_tsv(std::istream& in);
std::vector<EdgeRecord> read_edges_tsv(std::istream& in);

Schema load_schema_file(const std::string& path);
std::vector<NodeRecord> load_nodes_file(const std::string& path);
std::vector<EdgeRecord> load_edges_file(const std::string& path);
HinGraph load_graph_files(const std::string& schema_path, const std::string& nodes_path,
                          const std::string& edges_path);

void write_schema_tsv(std::ostream& out, const Schema& schema);
void write_nodes_tsv(std::ostream& out, const HinGraph& graph);
void write_edges_tsv(std::ostream& out, const HinGraph& graph);

/// COO text export: `row_id<TAB>col_id<TAB>value`, 12 significant digits,
/// zeros omitted. `header_lines` are emitted first, prefixed with `# `.
void write_matrix_coo(std::ostream& out, const SparseMatrix& m,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& col_ids,
                      const std::vector<std::string>& header_lines = {});

struct CooFile {
  std::vector<std::string> header_lines;  // without the leading "# "
  std::vector<std::string> row_ids, col_ids;  // id order of first appearance
  SparseMatrix matrix;
};

/// Reads a COO text file back; ids are re-indexed by first appearance
/// unless explicit id orders are supplied.
CooFile read_matrix_coo(std::istream& in,
                        const std::vector<std::string>* row_ids = nullptr,
                        const std::vector<std::string>* col_ids = nullptr);

std::string format_value_12sig(double v);

}  // namespace hetesim
