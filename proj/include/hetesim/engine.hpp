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

#include <span>
#include <string>
#include <vector>

#include "hetesim/graph.hpp"
#include "hetesim/metapath.hpp"

namespace hetesim {

enum class Strategy { exact, dp, truncated, hybrid, monte_carlo };

std::string_view to_string(Strategy s);

/// Wall-clock split of a relevance computation: MUL covers the two
/// transition-matrix chains, REL the final cross product plus
/// normalization. `intermediate_nnz` records the size of every matrix
/// produced during MUL, in evaluation order.
struct PhaseStats {
  double mul_seconds = 0.0;
  double rel_seconds = 0.0;
  std::vector<Index> intermediate_nnz;

  Index peak_intermediate_nnz() const;
};

/// A relevance matrix with its provenance: which path, which strategy,
/// which parameters, raw or normalized. Scores are indexed by the
/// path's source type (rows) and target type (columns).
struct RelevanceResult {
  SparseMatrix scores;
  std::string path;    // canonical path string
  bool normalized = true;
  Strategy strategy = Strategy::exact;
  std::string params;  // rendered strategy parameters, "" when none
  PhaseStats stats;
};

/// Validates that the path's relation indices and chain are meaningful
/// on this schema; throws SchemaMismatch otherwise.
void validate_path_on(const Schema& schema, const MetaPath& path);

/// Reachable-probability matrix: the product of row-transition matrices
/// along the whole path. Entry (i, j) is the probability that a walker
/// from node i ends at node j; rows are sub-stochastic when dangling
/// nodes lose mass.
ProbMatrix reachable_matrix(const HinGraph& graph, const MetaPath& path);

/// HeteSim relevance matrix for all (source, target) pairs.
///
/// The path is decomposed into two equal-length halves; the source walks
/// the left half and the target walks the right half backwards, and the
/// score couples the two arrival distributions at the middle space.
/// Normalized scores are the cosine of those distributions, in [0, 1];
/// raw scores are their inner product. Pairs where either side has no
/// reachable mass score 0.
RelevanceResult hetesim_scores(const HinGraph& graph, const MetaPath& path, bool normalized = true);
RelevanceResult hetesim_raw(const HinGraph& graph, const MetaPath& path);

/// Single-pair score computed with two row walks only (no full matrix
/// products). Matches the corresponding entry of `hetesim` exactly.
double hetesim_pair(const HinGraph& graph, const MetaPath& path, std::string_view source_id,
                    std::string_view target_id, bool normalized = true);

/// One source row of scores against every target (dense by target
/// index). Walks the left side as a single row; only the right half
/// matrix is materialized. Matches the full-matrix row exactly.
std::vector<double> hetesim_row(const HinGraph& graph, const MetaPath& path,
                                std::string_view source_id, bool normalized = true);

/// Independent oracle: direct recursive evaluation of the pairwise
/// random walk (peel one relation from each end, average over neighbor
/// pairs, base cases self-relation and atomic relation). Exponential
/// without the internal memo; intended for small graphs and short paths.
/// Returns the raw (non-normalized) score.
double hetesim_recursive_oracle(const HinGraph& graph, const MetaPath& path,
                                std::string_view source_id, std::string_view target_id);

namespace detail {

/// Transition matrices for a step sequence (empty -> empty vector).
std::vector<SparseMatrix> transition_chain(const HinGraph& graph,
                                           std::span<const RelationRef> steps);

/// Left-to-right product; an empty chain yields identity(fallback_dim).
/// Records intermediate nnz into stats when given.
SparseMatrix chain_product_ltr(std::span<const SparseMatrix> chain, Index fallback_dim,
                               PhaseStats* stats);

/// Odd-path middle pieces for a relation walked as `step`:
///   coupling(u, v) = w_uv / (Σ_v' √w_uv' · Σ_u' √w_u'v)
/// which equals the edge-space product U_O · U_I'^T without materializing
/// the |E|-dimensional rows, plus the per-node factors that turn row
/// norms over nodes into row norms over the edge space:
///   left_norm_factors(u)  = (Σ_v w_uv) / (Σ_v √w_uv)²
///   right_norm_factors(v) = (Σ_u w_uv) / (Σ_u √w_uv)²
struct MiddleInfo {
  SparseMatrix coupling;
  std::vector<double> left_norm_factors;
  std::vector<double> right_norm_factors;
};

MiddleInfo middle_info(const HinGraph& graph, const RelationRef& middle);

/// REL phase shared by all strategies. `left` and `right` are the two
/// half-path probability matrices (rows: source / target nodes). For odd
/// paths pass the MiddleInfo; for even paths (or edge-space estimates)
/// pass nullptr and the column spaces must match. Normalized output is
/// clamped to [0, 1] against roundoff.
SparseMatrix scores_from_sides(const SparseMatrix& left, const SparseMatrix& right,
                               const MiddleInfo* middle, bool normalized);

/// √w split of an adjacency matrix: W = W_O · W_I with one edge-object
/// column per stored entry, ordered by (row, col). Exposed for the
/// decomposition property tests.
std::pair<SparseMatrix, SparseMatrix> decompose_relation_matrices(const SparseMatrix& w);

}  // namespace detail

}  // namespace hetesim
