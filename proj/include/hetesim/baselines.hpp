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

#include <string_view>
#include <utility>

#include "hetesim/engine.hpp"

namespace hetesim {

/// SimRank on the bipartite graph of one relation.
///
/// Two formulations are provided because they serve different purposes:
///
///   - `Variant::hop_sum` iterates the pairwise meeting-probability
///     recurrence (SimRank_0 = identity on each side, each hop averages
///     the previous hop over neighbor pairs and scales by C) and returns
///     the partial sum of hops 1..n. With C = 1 the n-th partial sum
///     equals the sum over k <= n of raw HeteSim along (R R^-1)^k — the
///     identity the property suite checks.
///
///   - `Variant::classic` is the usual fixed-point iteration with the
///     diagonal pinned to 1 every round; scores stay in [0, 1].
struct SimRankParams {
  double c = 1.0;
  Index iterations = 0;
  enum class Variant { hop_sum, classic };
  Variant variant = Variant::hop_sum;

  void validate() const;
};

struct SimRankResult {
  SparseMatrix source_pairs;  // |R.S| x |R.S|
  SparseMatrix target_pairs;  // |R.T| x |R.T|
};

SimRankResult simrank(const HinGraph& graph, std::string_view relation_id,
                      const SimRankParams& params);
SimRankResult simrank(const HinGraph& graph, const RelationRef& relation,
                      const SimRankParams& params);

/// Path-constrained random walk: the single-sided reachable probability
/// along the path. Asymmetric by construction.
ProbMatrix pcrw(const HinGraph& graph, const MetaPath& path);

/// PathSim over a symmetric path: 2 M(a,b) / (M(a,a) + M(b,b)) where M
/// counts path instances (product of unnormalized adjacencies along the
/// left half times its transpose). Throws AsymmetricPath otherwise.
RelevanceResult pathsim(const HinGraph& graph, const MetaPath& path);

}  // namespace hetesim
