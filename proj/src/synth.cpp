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

#include "hetesim/synth.hpp"

#include <algorithm>
#include <set>

#include "hetesim/errors.hpp"
#include "hetesim/rng.hpp"

namespace hetesim {

namespace {

std::string node_name(const std::string& type, Index i) {
  return type + "_" + std::to_string(i);
}

void add_nodes(SynthDataset& ds, const std::string& type, Index count) {
  for (Index i = 0; i < count; ++i) ds.nodes.push_back({node_name(type, i), type});
}

// Each source draws ~out_degree distinct targets.
void add_random_edges(SynthDataset& ds, CounterRng& rng, const std::string& rel,
                      const std::string& src_type, Index n_src, const std::string& dst_type,
                      Index n_dst, double out_degree, bool weighted) {
  for (Index s = 0; s < n_src; ++s) {
    Index want = static_cast<Index>(out_degree);
    if (rng.next_unit() < out_degree - static_cast<double>(want)) ++want;
    want = std::min(want, n_dst);
    std::set<Index> targets;
    while (static_cast<Index>(targets.size()) < want)
      targets.insert(static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n_dst))));
    for (Index t : targets) {
      double w = weighted ? 0.5 + 1.5 * rng.next_unit() : 1.0;
      ds.edges.push_back({node_name(src_type, s), node_name(dst_type, t), rel, w});
    }
  }
}

}  // namespace

SynthDataset make_random(const SynthConfig& config) {
  if (config.types < 1 || config.nodes_per_type < 1 || config.relations < 1)
    raise(ErrorKind::InvalidArgument, "synthetic config needs positive sizes");
  CounterRng rng = CounterRng::substream(config.seed, 0x73796e7468ULL, config.types,
                                         config.relations);

  std::vector<std::string> type_names;
  for (Index t = 0; t < config.types; ++t) type_names.push_back("T" + std::to_string(t));

  std::vector<RelationDef> rels;
  for (Index r = 0; r < config.relations; ++r) {
    // First relations chain the types so every type touches one.
    Index src, dst;
    if (r < config.types) {
      src = r % config.types;
      dst = (r + 1) % config.types;
    } else {
      src = static_cast<Index>(rng.next_below(config.types));
      dst = static_cast<Index>(rng.next_below(config.types));
    }
    rels.push_back({"R" + std::to_string(r), type_names[src], type_names[dst], config.weighted});
  }

  SynthDataset ds;
  ds.schema = Schema(type_names, rels);
  for (const auto& t : type_names) add_nodes(ds, t, config.nodes_per_type);
  for (const auto& rel : rels)
    add_random_edges(ds, rng, rel.id, rel.source_type, config.nodes_per_type, rel.target_type,
                     config.nodes_per_type, config.out_degree, config.weighted);
  return ds;
}

SynthDataset make_tg1() {
  SynthDataset ds;
  ds.schema = Schema({"A", "B"}, {{"AB", "A", "B", false}});
  ds.nodes = {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}, {"b2", "B"}, {"b3", "B"}, {"b4", "B"}};
  ds.edges = {{"a1", "b1", "AB", 1.0}, {"a1", "b2", "AB", 1.0}, {"a1", "b4", "AB", 1.0},
              {"a2", "b2", "AB", 1.0}, {"a2", "b3", "AB", 1.0}, {"a2", "b4", "AB", 1.0}};
  return ds;
}

SynthDataset make_bench(std::uint64_t seed, Index a_nodes, Index b_nodes, Index p_nodes) {
  CounterRng rng = CounterRng::substream(seed, 0x62656e6368ULL, a_nodes, b_nodes);
  SynthDataset ds;
  ds.schema = Schema({"A", "B", "P"},
                     {{"AB", "A", "B", false}, {"AP", "A", "P", false}});
  add_nodes(ds, "A", a_nodes);
  add_nodes(ds, "B", b_nodes);
  add_nodes(ds, "P", p_nodes);
  // Dense chain: the tiny B type mixes A thoroughly after two steps.
  add_random_edges(ds, rng, "AB", "A", a_nodes, "B", b_nodes, 8.0, false);
  // Sparse chain: wide P with low degree keeps products thin.
  add_random_edges(ds, rng, "AP", "A", a_nodes, "P", p_nodes, 3.0, false);
  return ds;
}

}  // namespace hetesim
