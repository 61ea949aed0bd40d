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

#include "hetesim/baselines.hpp"

#include <cmath>

#include "hetesim/errors.hpp"

namespace hetesim {

void SimRankParams::validate() const {
  if (!(c > 0.0 && c <= 1.0)) raise(ErrorKind::InvalidArgument, "C must be in (0,1]");
  if (iterations < 0) raise(ErrorKind::InvalidArgument, "iterations must be >= 0");
}

namespace {

SparseMatrix with_unit_diagonal(const SparseMatrix& m) {
  std::vector<Coo> entries;
  entries.reserve(m.nnz() + m.rows());
  for (const Coo& e : m.to_coo())
    if (e.row != e.col) entries.push_back(e);
  for (Index i = 0; i < m.rows(); ++i) entries.push_back({i, i, 1.0});
  return SparseMatrix::from_coo(m.rows(), m.cols(), std::move(entries));
}

SparseMatrix scale(const SparseMatrix& m, double factor) {
  return m.map_values([factor](double v) { return v * factor; });
}

// One pairwise hop on each side: next_a = c * U Mb U', next_b = c * V Ma V'
// where U walks source->target and V walks target->source.
std::pair<SparseMatrix, SparseMatrix> hop(const SparseMatrix& u, const SparseMatrix& v,
                                          const SparseMatrix& ma, const SparseMatrix& mb,
                                          double c) {
  SparseMatrix next_a = scale(multiply_abt(multiply(u, mb), u), c);
  SparseMatrix next_b = scale(multiply_abt(multiply(v, ma), v), c);
  return {std::move(next_a), std::move(next_b)};
}

}  // namespace

SimRankResult simrank(const HinGraph& graph, const RelationRef& relation,
                      const SimRankParams& params) {
  params.validate();
  SparseMatrix u = graph.transition_row(relation).matrix;
  SparseMatrix v = graph.transition_row(relation.inverted()).matrix;

  SparseMatrix ma = SparseMatrix::identity(u.rows());
  SparseMatrix mb = SparseMatrix::identity(u.cols());
  if (params.iterations == 0) return {std::move(ma), std::move(mb)};

  if (params.variant == SimRankParams::Variant::classic) {
    SparseMatrix sa = ma, sb = mb;
    for (Index k = 0; k < params.iterations; ++k) {
      auto [na, nb] = hop(u, v, sa, sb, params.c);
      sa = with_unit_diagonal(na);
      sb = with_unit_diagonal(nb);
    }
    return {std::move(sa), std::move(sb)};
  }

  SparseMatrix sum_a(u.rows(), u.rows());
  SparseMatrix sum_b(u.cols(), u.cols());
  for (Index k = 0; k < params.iterations; ++k) {
    auto [na, nb] = hop(u, v, ma, mb, params.c);
    ma = std::move(na);
    mb = std::move(nb);
    sum_a = add(sum_a, ma);
    sum_b = add(sum_b, mb);
  }
  return {std::move(sum_a), std::move(sum_b)};
}

SimRankResult simrank(const HinGraph& graph, std::string_view relation_id,
                      const SimRankParams& params) {
  return simrank(graph, RelationRef::forward(graph.schema().relation_index(relation_id)), params);
}

ProbMatrix pcrw(const HinGraph& graph, const MetaPath& path) {
  return reachable_matrix(graph, path);
}

RelevanceResult pathsim(const HinGraph& graph, const MetaPath& path) {
  validate_path_on(graph.schema(), path);
  if (!is_symmetric(path))
    raise(ErrorKind::AsymmetricPath, to_string(graph.schema(), path));

  DecomposedPath d = decompose(graph.schema(), path);
  Index n = graph.node_count(path.source_type());

  // Path-count matrix along the left half. The only odd symmetric path
  // is the self-relation, whose count matrix is the identity.
  SparseMatrix counts = SparseMatrix::identity(n);
  for (const RelationRef& step : d.left) counts = multiply(counts, graph.adjacency(step));
  SparseMatrix m = multiply_abt(counts, counts);

  std::vector<double> diag(n, 0.0);
  for (Index i = 0; i < n; ++i) diag[i] = m.at(i, i);

  std::vector<Coo> entries;
  for (const Coo& e : m.to_coo()) {
    double denom = diag[e.row] + diag[e.col];
    if (denom > 0.0) entries.push_back({e.row, e.col, 2.0 * e.value / denom});
  }

  RelevanceResult result;
  result.scores = SparseMatrix::from_coo(n, n, std::move(entries));
  result.path = to_string(graph.schema(), path);
  result.normalized = true;
  result.strategy = Strategy::exact;
  return result;
}

}  // namespace hetesim
