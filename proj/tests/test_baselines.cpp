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

#include <cmath>
#include <random>

#include "hetesim/baselines.hpp"
#include "hetesim/errors.hpp"
#include "hetesim/synth.hpp"
#include "support/random_hin.hpp"

using namespace hetesim;

namespace {

HinGraph tg1() { return make_tg1().build(); }

// Partial sums of raw HeteSim along (R R^-1)^k and (R^-1 R)^k — the
// other side of the SimRank identity, computed through the engine.
std::pair<SparseMatrix, SparseMatrix> hetesim_partial_sums(const HinGraph& g,
                                                           const std::string& rel, Index n) {
  const Schema& schema = g.schema();
  RelationRef fwd = RelationRef::forward(schema.relation_index(rel));
  SparseMatrix sum_a(g.node_count(source_type_of(schema, fwd)),
                     g.node_count(source_type_of(schema, fwd)));
  SparseMatrix sum_b(g.node_count(target_type_of(schema, fwd)),
                     g.node_count(target_type_of(schema, fwd)));
  std::vector<RelationRef> a_steps, b_steps;
  for (Index k = 1; k <= n; ++k) {
    a_steps.push_back(fwd);            // (R R^-1)^k grows two steps per hop
    a_steps.push_back(fwd.inverted());
    b_steps.push_back(fwd.inverted()); // (R^-1 R)^k
    b_steps.push_back(fwd);
    sum_a = add(sum_a, hetesim_raw(g, MetaPath(schema, a_steps)).scores);
    sum_b = add(sum_b, hetesim_raw(g, MetaPath(schema, b_steps)).scores);
  }
  return {std::move(sum_a), std::move(sum_b)};
}

}  // namespace

TEST_CASE("simrank iteration zero is the identity on both sides") {
  auto g = tg1();
  SimRankParams params;
  params.iterations = 0;
  auto [sa, sb] = simrank(g, "AB", params);
  CHECK(sa.max_abs_diff(SparseMatrix::identity(2)) == 0.0);
  CHECK(sb.max_abs_diff(SparseMatrix::identity(4)) == 0.0);
}

TEST_CASE("simrank partial sums equal accumulated raw HeteSim over pairwise hops") {
  auto g = tg1();
  for (Index n = 1; n <= 4; ++n) {
    SimRankParams params;
    params.c = 1.0;
    params.iterations = n;
    auto [sa, sb] = simrank(g, "AB", params);
    auto [ha, hb] = hetesim_partial_sums(g, "AB", n);
    CHECK(sa.max_abs_diff(ha) < 1e-10);
    CHECK(sb.max_abs_diff(hb) < 1e-10);
  }
}

TEST_CASE("simrank identity holds on random bipartite graphs") {
  std::mt19937_64 rng(111);
  for (int trial = 0; trial < 10; ++trial) {
    testsupport::RandomHinOptions opt;
    opt.max_types = 2;
    opt.max_nodes = 12;
    opt.extra_relations = 0;
    opt.weighted = trial % 2 == 1;
    auto g = testsupport::random_graph(rng, opt);
    const std::string rel = "R0";
    for (Index n : {1, 3}) {
      SimRankParams params;
      params.iterations = n;
      auto [sa, sb] = simrank(g, rel, params);
      auto [ha, hb] = hetesim_partial_sums(g, rel, n);
      CHECK(sa.max_abs_diff(ha) < 1e-10);
      CHECK(sb.max_abs_diff(hb) < 1e-10);
    }
  }
}

TEST_CASE("simrank matrices stay symmetric at every iteration") {
  std::mt19937_64 rng(113);
  testsupport::RandomHinOptions opt;
  opt.max_types = 2;
  opt.extra_relations = 0;
  auto g = testsupport::random_graph(rng, opt);
  for (Index n = 0; n <= 4; ++n) {
    for (auto variant : {SimRankParams::Variant::hop_sum, SimRankParams::Variant::classic}) {
      SimRankParams params;
      params.iterations = n;
      params.c = 0.9;
      params.variant = variant;
      auto [sa, sb] = simrank(g, "R0", params);
      CHECK(sa.max_abs_diff(sa.transposed()) < 1e-12);
      CHECK(sb.max_abs_diff(sb.transposed()) < 1e-12);
    }
  }
}

TEST_CASE("classic simrank keeps unit diagonal and [0,1] range") {
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 8; ++trial) {
    testsupport::RandomHinOptions opt;
    opt.max_types = 2;
    opt.extra_relations = 0;
    auto g = testsupport::random_graph(rng, opt);
    SimRankParams params;
    params.c = 0.8;
    params.iterations = 5;
    params.variant = SimRankParams::Variant::classic;
    auto [sa, sb] = simrank(g, "R0", params);
    for (const auto* m : {&sa, &sb}) {
      for (Index i = 0; i < m->rows(); ++i) CHECK(m->at(i, i) == 1.0);
      for (const Coo& e : m->to_coo()) {
        CHECK(e.value >= 0.0);
        CHECK(e.value <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("simrank parameter validation and unknown relation") {
  auto g = tg1();
  SimRankParams params;
  params.c = 0.0;
  CHECK_THROWS_AS((void)simrank(g, "AB", params), Error);
  params = {};
  CHECK_THROWS_AS((void)simrank(g, "ZZ", params), Error);
}

TEST_CASE("pcrw is the single-sided walk probability") {
  auto g = tg1();
  auto p = parse_path("A-B", g.schema());
  auto pm = pcrw(g, p);
  CHECK(pm.matrix.at(1, 0) == 0.0);
  CHECK(pm.matrix.at(1, 1) == doctest::Approx(1.0 / 3));
  CHECK(pm.matrix.at(1, 2) == doctest::Approx(1.0 / 3));
  CHECK(pm.matrix.at(1, 3) == doctest::Approx(1.0 / 3));
  CHECK(pm.matrix.max_abs_diff(reachable_matrix(g, p).matrix) == 0.0);
}

TEST_CASE("pcrw is asymmetric in general") {
  auto g = tg1();
  auto p = parse_path("A-B", g.schema());
  auto fwd = pcrw(g, p);
  auto bwd = pcrw(g, reverse(g.schema(), p));
  // b3 reaches a2 with probability 1, but a2 reaches b3 with 1/3.
  CHECK(fwd.matrix.at(1, 2) == doctest::Approx(1.0 / 3));
  CHECK(bwd.matrix.at(2, 1) == doctest::Approx(1.0));
}

TEST_CASE("pathsim rejects asymmetric paths") {
  Schema schema({"A", "P", "V", "C"}, {{"AP", "A", "P", false},
                                       {"PV", "P", "V", false},
                                       {"VC", "V", "C", false}});
  std::vector<NodeRecord> nodes = {{"a", "A"}, {"p", "P"}, {"v", "V"}, {"c", "C"}};
  auto g = build_graph(schema, nodes,
                       {{"a", "p", "AP", 1.0}, {"p", "v", "PV", 1.0}, {"v", "c", "VC", 1.0}});
  try {
    (void)pathsim(g, parse_path("A-P-V-C", schema));
    FAIL("expected asymmetric-path error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AsymmetricPath);
  }
}

TEST_CASE("pathsim on the worked example matches the hand computation") {
  auto g = tg1();
  auto p = parse_path("A-B-A", g.schema());
  auto r = pathsim(g, p);
  // Path counts: M = W W', W rows a1=(1,1,0,1), a2=(0,1,1,1):
  // M(a1,a1)=3, M(a2,a2)=3, M(a1,a2)=2 -> score 2*2/(3+3) = 2/3.
  CHECK(r.scores.at(0, 0) == doctest::Approx(1.0));
  CHECK(r.scores.at(1, 1) == doctest::Approx(1.0));
  CHECK(r.scores.at(0, 1) == doctest::Approx(2.0 / 3));
  CHECK(r.scores.at(1, 0) == doctest::Approx(2.0 / 3));
}

TEST_CASE("pathsim diagonal is 1 for connected nodes and 0 rows stay empty") {
  Schema schema({"A", "B"}, {{"AB", "A", "B", false}});
  auto g = build_graph(schema, {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}},
                       {{"a1", "b1", "AB", 1.0}});
  auto r = pathsim(g, parse_path("A-B-A", schema));
  CHECK(r.scores.at(0, 0) == doctest::Approx(1.0));
  CHECK(r.scores.row_nnz(1) == 0);  // a2 has no path instances at all
}

TEST_CASE("pathsim on the self-relation is the identity") {
  auto g = tg1();
  auto r = pathsim(g, parse_path("I(A)", g.schema()));
  CHECK(r.scores.max_abs_diff(SparseMatrix::identity(2)) == 0.0);
}
