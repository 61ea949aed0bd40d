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
#include <string>
#include <vector>

#include "hetesim/graph.hpp"

namespace hetesim {

/// A dataset in record form, ready to build or to write as TSV files.
struct SynthDataset {
  Schema schema;
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;

  HinGraph build() const { return build_graph(schema, nodes, edges); }
};

struct SynthConfig {
  std::uint64_t seed = 1;
  Index types = 3;
  Index nodes_per_type = 40;
  Index relations = 3;
  double out_degree = 3.0;  // expected out-degree per source node
  bool weighted = false;
};

/// Seeded random heterogeneous graph. Relation endpoints are drawn so
/// every type touches at least one relation; edge targets are uniform.
SynthDataset make_random(const SynthConfig& config);

/// The 2x4 bipartite worked-example fixture: a1 -> {b1, b2, b4},
/// a2 -> {b2, b3, b4} under relation AB.
SynthDataset make_tg1();

/// Benchmark graph with one low-dimension dense chain (A-B, |B| small,
/// A-B-A mixes everything) and one high-dimension sparse chain (A-P,
/// |P| large, low degree). Drives the strategy timing comparisons.
SynthDataset make_bench(std::uint64_t seed = 1, Index a_nodes = 1200, Index b_nodes = 60,
                        Index p_nodes = 2500);

}  // namespace hetesim
