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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "hetesim/errors.hpp"
#include "hetesim/graph.hpp"
#include "hetesim/synth.hpp"
#include "support/random_hin.hpp"

using namespace hetesim;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("single-edge graph") {
  Schema schema({"A", "B"}, {{"R", "A", "B", false}});
  auto g = build_graph(schema, {{"a1", "A"}, {"b1", "B"}}, {{"a1", "b1", "R", 1.0}});
  const auto& w = g.adjacency("R");
  CHECK(w.rows() == 1);
  CHECK(w.cols() == 1);
  CHECK(w.at(0, 0) == 1.0);
}

TEST_CASE("TG1 adjacency") {
  auto g = make_tg1().build();
  const auto& w = g.adjacency("AB");
  CHECK(w.rows() == 2);
  CHECK(w.cols() == 4);
  CHECK(w.nnz() == 6);
  Index a2 = g.node_index(g.schema().type_index("A"), "a2");
  std::vector<double> row;
  for (Index c = 0; c < 4; ++c) row.push_back(w.at(a2, c));
  CHECK(row == std::vector<double>{0.0, 1.0, 1.0, 1.0});

  // Inverse reference yields the transpose.
  const auto& wt = g.adjacency("AB~");
  CHECK(wt.rows() == 4);
  CHECK(wt.cols() == 2);
  CHECK(wt.max_abs_diff(w.transposed()) == 0.0);
}

TEST_CASE("empty relation gives an all-zero matrix of the right shape") {
  Schema schema({"A", "B"}, {{"R", "A", "B", false}, {"S", "A", "B", false}});
  auto g = build_graph(schema, {{"a1", "A"}, {"b1", "B"}, {"b2", "B"}}, {{"a1", "b1", "R", 1.0}});
  const auto& w = g.adjacency("S");
  CHECK(w.rows() == 1);
  CHECK(w.cols() == 2);
  CHECK(w.nnz() == 0);
}

TEST_CASE("edge endpoint type violations") {
  Schema schema({"A", "B"}, {{"R", "A", "B", false}});
  std::vector<NodeRecord> nodes = {{"a1", "A"}, {"b1", "B"}};
  CHECK(kind_of([&] { build_graph(schema, nodes, {{"b1", "a1", "R", 1.0}}); }) ==
        ErrorKind::TypeMismatch);
  CHECK(kind_of([&] { build_graph(schema, nodes, {{"zz", "b1", "R", 1.0}}); }) ==
        ErrorKind::UnknownNode);
  CHECK(kind_of([&] { build_graph(schema, nodes, {{"a1", "b1", "Q", 1.0}}); }) ==
        ErrorKind::UnknownRelation);
  CHECK(kind_of([&] { build_graph(schema, nodes, {{"a1", "b1", "R", 0.0}}); }) ==
        ErrorKind::NonPositiveWeight);
  CHECK(kind_of([&] { build_graph(schema, nodes, {{"a1", "b1", "R", -2.0}}); }) ==
        ErrorKind::NonPositiveWeight);
  CHECK(kind_of([&] {
          build_graph(schema, {{"a1", "A"}, {"a1", "A"}, {"b1", "B"}}, {});
        }) == ErrorKind::DuplicateNode);
  CHECK(kind_of([&] { build_graph(schema, {{"a1", "Q"}}, {}); }) == ErrorKind::UnknownType);
}

TEST_CASE("schema construction enforces its own invariants") {
  CHECK_THROWS_AS(Schema({"A"}, {{"R", "A", "Z", false}}), Error);       // unknown endpoint
  CHECK_THROWS_AS(Schema({"A", "A"}, {}), Error);                        // duplicate type
  CHECK_THROWS_AS(Schema({"A", "B"}, {{"R", "A", "B", false}, {"R", "B", "A", false}}),
                  Error);                                                // duplicate relation id
}

TEST_CASE("duplicate edges accumulate weight") {
  Schema schema({"A", "B"}, {{"R", "A", "B", true}});
  auto g = build_graph(schema, {{"a1", "A"}, {"b1", "B"}},
                       {{"a1", "b1", "R", 1.0}, {"a1", "b1", "R", 2.5}});
  CHECK(g.adjacency("R").at(0, 0) == doctest::Approx(3.5));
}

TEST_CASE("transition_row on TG1") {
  auto g = make_tg1().build();
  auto u = g.transition_row("AB");
  u.check_sub_stochastic();
  Index a2 = 1;
  CHECK(u.matrix.at(a2, 0) == 0.0);
  CHECK(u.matrix.at(a2, 1) == doctest::Approx(1.0 / 3));
  CHECK(u.matrix.at(a2, 2) == doctest::Approx(1.0 / 3));
  CHECK(u.matrix.at(a2, 3) == doctest::Approx(1.0 / 3));
}

TEST_CASE("weighted diagonal normalizes to identity") {
  Schema schema({"A", "B"}, {{"R", "A", "B", true}});
  auto g = build_graph(schema, {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}, {"b2", "B"}},
                       {{"a1", "b1", "R", 2.0}, {"a2", "b2", "R", 2.0}});
  auto u = g.transition_row("R");
  CHECK(u.matrix.max_abs_diff(SparseMatrix::identity(2)) == 0.0);
}

TEST_CASE("isolated source keeps an all-zero row without error") {
  Schema schema({"A", "B"}, {{"R", "A", "B", false}});
  auto g = build_graph(schema, {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}}, {{"a1", "b1", "R", 1.0}});
  auto u = g.transition_row("R");
  CHECK(u.matrix.row_nnz(1) == 0);
  auto sums = u.matrix.row_sums();
  CHECK(sums[0] == doctest::Approx(1.0));
  CHECK(sums[1] == 0.0);
}

TEST_CASE("transition_col on TG1: column b3 comes only from a2") {
  auto g = make_tg1().build();
  auto v = g.transition_col("AB");
  CHECK(v.matrix.at(0, 2) == 0.0);
  CHECK(v.matrix.at(1, 2) == doctest::Approx(1.0));
  // Nonzero columns sum to 1.
  auto cs = v.matrix.col_sums();
  for (double s : cs) CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("row/column normalization duality on random graphs") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    testsupport::RandomHinOptions opt;
    opt.weighted = trial % 2 == 1;
    auto g = testsupport::random_graph(rng, opt);
    for (Index r = 0; r < g.schema().relation_count(); ++r) {
      for (auto ref : {RelationRef::forward(r), RelationRef::inverse(r)}) {
        auto u = g.transition_row(ref);
        auto v = g.transition_col(ref.inverted());
        auto vt = v.matrix.transposed();
        CHECK(u.matrix.same_pattern(vt));
        CHECK(u.matrix.max_abs_diff(vt) < 1e-12);
        // Nonzero rows of U sum to 1.
        for (double s : u.matrix.row_sums())
          CHECK((s == 0.0 || std::abs(s - 1.0) < 1e-12));
      }
    }
  }
}

TEST_CASE("build_graph is edge-order independent") {
  std::mt19937_64 rng(55);
  auto ds = make_tg1();
  std::vector<EdgeRecord> edges = ds.edges;
  edges.push_back({"a1", "b1", "AB", 1.0});  // duplicate to exercise accumulation order
  auto base = build_graph(ds.schema, ds.nodes, edges);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(edges.begin(), edges.end(), rng);
    auto permuted = build_graph(ds.schema, ds.nodes, edges);
    CHECK(base.adjacency("AB").same_pattern(permuted.adjacency("AB")));
    CHECK(base.adjacency("AB").max_abs_diff(permuted.adjacency("AB")) == 0.0);
  }
}

TEST_CASE("TSV round trip reproduces adjacency exactly") {
  std::mt19937_64 rng(77);
  testsupport::RandomHinOptions opt;
  opt.weighted = true;
  auto g = testsupport::random_graph(rng, opt);

  std::stringstream schema_s, nodes_s, edges_s;
  write_schema_tsv(schema_s, g.schema());
  write_nodes_tsv(nodes_s, g);
  write_edges_tsv(edges_s, g);

  auto schema2 = read_schema_tsv(schema_s);
  auto g2 = build_graph(schema2, read_nodes_tsv(nodes_s), read_edges_tsv(edges_s));
  for (Index r = 0; r < g.schema().relation_count(); ++r) {
    const auto& a = g.adjacency(RelationRef::forward(r));
    const auto& b = g2.adjacency(RelationRef::forward(r));
    CHECK(a.same_pattern(b));
    CHECK(a.max_abs_diff(b) == 0.0);
  }
  CHECK(g.content_hash() == g2.content_hash());
}

TEST_CASE("unweighted TSV round trip is bit exact") {
  auto ds = make_tg1();
  auto g = ds.build();
  std::stringstream nodes_s, edges_s;
  write_nodes_tsv(nodes_s, g);
  write_edges_tsv(edges_s, g);
  auto g2 = build_graph(ds.schema, read_nodes_tsv(nodes_s), read_edges_tsv(edges_s));
  CHECK(g.adjacency("AB").max_abs_diff(g2.adjacency("AB")) == 0.0);
  CHECK(g.content_hash() == g2.content_hash());
}

TEST_CASE("TSV parse errors carry line numbers") {
  std::stringstream bad("a1\tA\nbroken_line_without_tab\n");
  try {
    read_nodes_tsv(bad);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("COO matrix file round trip with headers") {
  auto g = make_tg1().build();
  auto u = g.transition_row("AB");
  const auto& rows = g.node_ids(0);
  const auto& cols = g.node_ids(1);
  std::stringstream s;
  write_matrix_coo(s, u.matrix, rows, cols, {"path AB", "strategy exact", "graph-hash 0"});
  auto file = read_matrix_coo(s, &rows, &cols);
  CHECK(file.header_lines.size() == 3);
  CHECK(file.header_lines[0] == "path AB");
  CHECK(file.matrix.max_abs_diff(u.matrix) < 1e-12);
}

TEST_CASE("content hash is sensitive to edges") {
  auto ds = make_tg1();
  auto g1 = ds.build();
  ds.edges.pop_back();
  auto g2 = ds.build();
  CHECK(g1.content_hash() != g2.content_hash());
}
