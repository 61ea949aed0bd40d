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

#include "hetesim/accel.hpp"
#include "hetesim/errors.hpp"
#include "hetesim/eval.hpp"
#include "hetesim/synth.hpp"
#include "support/oracles.hpp"
#include "support/random_hin.hpp"

using namespace hetesim;

namespace {

HinGraph tg1() { return make_tg1().build(); }

double max_rel_diff(const SparseMatrix& a, const SparseMatrix& b) {
  REQUIRE(a.same_shape(b));
  double worst = 0.0;
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c) {
      double x = a.at(r, c), y = b.at(r, c);
      double scale = std::max({std::abs(x), std::abs(y), 1e-300});
      if (x != y) worst = std::max(worst, std::abs(x - y) / scale);
    }
  return worst;
}

SparseMatrix random_prob_matrix(std::mt19937_64& rng, Index rows, Index cols, double density) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Coo> entries;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      if (unit(rng) < density) entries.push_back({r, c, unit(rng)});
  return SparseMatrix::from_coo(rows, cols, std::move(entries));
}

}  // namespace

TEST_CASE("chain_order picks the cheap split") {
  std::vector<std::pair<Index, Index>> dims = {{10, 100}, {100, 5}, {5, 50}};
  auto plan = chain_order(dims);
  CHECK(plan.total_cost == 7500);  // (M1 M2) first: 10*100*5 + 10*5*50
  CHECK(plan.split[0][2] == 1);
}

TEST_CASE("single matrix costs nothing") {
  std::vector<std::pair<Index, Index>> dims = {{7, 9}};
  CHECK(chain_order(dims).total_cost == 0);
}

TEST_CASE("chain_order rejects incompatible chains") {
  std::vector<std::pair<Index, Index>> dims = {{2, 3}, {4, 5}};
  CHECK_THROWS_AS((void)chain_order(dims), Error);
}

TEST_CASE("chain_order equals exhaustive parenthesization") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<Index> dim(1, 40);
  std::uniform_int_distribution<int> len(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    int n = len(rng);
    std::vector<std::pair<Index, Index>> dims;
    Index rows = dim(rng);
    for (int i = 0; i < n; ++i) {
      Index cols = dim(rng);
      dims.emplace_back(rows, cols);
      rows = cols;
    }
    auto plan = chain_order(dims);
    CHECK(plan.total_cost == testsupport::exhaustive_chain_cost(dims));
    CHECK(plan.total_cost <= testsupport::left_to_right_cost(dims));
  }
}

TEST_CASE("multiply_chain equals the naive product and reuses sub-chains") {
  std::mt19937_64 rng(47);
  auto a = random_prob_matrix(rng, 12, 20, 0.4);
  auto b = random_prob_matrix(rng, 20, 4, 0.5);
  auto c = random_prob_matrix(rng, 4, 12, 0.6);
  auto d = random_prob_matrix(rng, 12, 20, 0.4);

  std::vector<SparseMatrix> ms = {a, b, c, d};
  std::vector<std::string> keys = {"a", "b", "c", "d"};
  std::vector<std::pair<Index, Index>> dims;
  for (auto& m : ms) dims.emplace_back(m.rows(), m.cols());
  auto plan = chain_order(dims);

  SubChainCache cache(16);
  auto got = multiply_chain(ms, keys, plan, &cache);
  auto naive = multiply(multiply(multiply(a, b), c), d);
  CHECK(max_rel_diff(got, naive) < 1e-9);

  // Same chain again: the full product comes straight from the cache.
  auto misses_before = cache.misses();
  auto again = multiply_chain(ms, keys, plan, &cache);
  CHECK(cache.hits() >= 1);
  CHECK(cache.misses() == misses_before);
  CHECK(again.max_abs_diff(got) == 0.0);
}

TEST_CASE("sub-chain cache is bounded with LRU eviction") {
  SubChainCache cache(2);
  cache.put("k1", SparseMatrix::identity(1));
  cache.put("k2", SparseMatrix::identity(2));
  CHECK(cache.get("k1") != nullptr);  // k1 now most recent
  cache.put("k3", SparseMatrix::identity(3));
  CHECK(cache.size() == 2);
  CHECK(cache.get("k2") == nullptr);  // evicted
  CHECK(cache.get("k1") != nullptr);
  CHECK(cache.get("k3") != nullptr);
}

TEST_CASE("dp strategy is lossless on the worked example") {
  auto g = tg1();
  for (const char* text : {"A-B", "A-B-A", "A-B-A-B-A"}) {
    auto p = parse_path(text, g.schema());
    SubChainCache cache(16);
    auto exact = hetesim_scores(g, p);
    auto dp = hetesim_dp(g, p, true, &cache);
    CHECK(dp.strategy == Strategy::dp);
    CHECK(max_rel_diff(dp.scores, exact.scores) < 1e-9);
  }
}

TEST_CASE("dp sub-path reuse kicks in for repeated symmetric paths") {
  std::mt19937_64 rng(53);
  testsupport::RandomHinOptions opt;
  opt.max_types = 3;
  auto g = testsupport::random_graph(rng, opt);
  auto half = testsupport::random_path(rng, g.schema(), 2);
  auto sym = concatenate(g.schema(), half, reverse(g.schema(), half));
  auto twice = concatenate(g.schema(), sym, sym);  // (P P) with duplicate halves

  SubChainCache cache(32);
  auto dp = hetesim_dp(g, twice, true, &cache);
  CHECK(cache.hits() >= 1);  // left and right halves share sub-chains
  auto exact = hetesim_scores(g, twice);
  CHECK(max_rel_diff(dp.scores, exact.scores) < 1e-9);
}

TEST_CASE("dp equals exact on random graphs and paths") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    testsupport::RandomHinOptions opt;
    opt.weighted = trial % 2 == 1;
    auto g = testsupport::random_graph(rng, opt);
    auto p = testsupport::random_path(rng, g.schema(), 1 + static_cast<int>(rng() % 6));
    SubChainCache cache(64);
    auto exact = hetesim_scores(g, p);
    auto dp = hetesim_dp(g, p, true, &cache);
    CHECK(max_rel_diff(dp.scores, exact.scores) < 1e-9);
    auto recall = matrix_recall_at_k(exact.scores, dp.scores, 100,
                                     g.node_ids(p.target_type()));
    CHECK(recall == 1.0);
  }
}

TEST_CASE("dynamic top-k rule") {
  CHECK(dynamic_k(100, 200, 0.5) == 100);       // L <= W keeps everything
  CHECK(dynamic_k(200, 200, 0.5) == 200);
  CHECK(dynamic_k(1000, 200, 0.5) == 228);      // floor(800^0.5) + 200
  CHECK(dynamic_k(1000, 200, 0.0) == 201);      // beta 0 -> W + 1
  CHECK(dynamic_k(1000, 200, 1.0) == 1000);     // beta 1 -> everything
  CHECK(dynamic_k(10001, 200, 0.5) == 299);     // floor(9801^0.5) = 99
  for (Index cols : {50, 300, 1234, 9999})
    for (Index w : {1, 10, 200})
      for (double beta : {0.0, 0.3, 0.5, 1.0}) {
        Index k = dynamic_k(cols, w, beta);
        Index want = cols <= w
                         ? cols
                         : static_cast<Index>(std::floor(std::pow(double(cols - w), beta))) + w;
        CHECK(k == want);
        CHECK(k <= cols);
        CHECK(k >= std::min<Index>(cols, 1));
      }
}

TEST_CASE("truncation is a no-op when the type fits in W") {
  std::mt19937_64 rng(61);
  auto m = random_prob_matrix(rng, 20, 50, 0.7);
  TruncationParams params;
  params.top_w = 50;
  CHECK(truncate_matrix(m, params).max_abs_diff(m) == 0.0);
}

TEST_CASE("exact fallback selects the true top-k*M threshold") {
  std::mt19937_64 rng(67);
  auto m = random_prob_matrix(rng, 4, 40, 0.9);
  TruncationParams params;
  params.top_w = 10;
  params.beta = 0.5;
  params.gamma = 0.001;  // tiny sample forces the exact path
  Index k = dynamic_k(m.cols(), params.top_w, params.beta);
  std::int64_t keep = k * m.rows();
  REQUIRE(m.nnz() > keep);

  std::vector<double> values(m.values().begin(), m.values().end());
  std::sort(values.begin(), values.end(), std::greater<>());
  double threshold = values[keep - 1];

  auto t = truncate_matrix(m, params);
  for (const Coo& e : t.to_coo()) CHECK(e.value >= threshold);
  // Count of entries >= threshold equals what survived.
  Index survivors = 0;
  for (double v : values) survivors += v >= threshold ? 1 : 0;
  CHECK(t.nnz() == survivors);
}

TEST_CASE("truncation never creates entries or increases values") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = random_prob_matrix(rng, 15, 200, 0.5);
    TruncationParams params;
    params.top_w = 20;
    params.gamma = 0.2;
    params.seed = trial;
    auto t = truncate_matrix(m, params);
    CHECK(t.nnz() <= m.nnz());
    for (const Coo& e : t.to_coo()) CHECK(e.value == m.at(e.row, e.col));
  }
}

TEST_CASE("sampled threshold keeps roughly k*M entries on a dense matrix") {
  // 100x1000 dense, W=200, beta=0.5, gamma=0.005: expect about k*M
  // survivors, averaged over seeds, within 20%.
  std::mt19937_64 rng(73);
  auto m = random_prob_matrix(rng, 100, 1000, 1.0);
  TruncationParams params;  // paper-style defaults
  params.top_w = 200;
  params.beta = 0.5;
  params.gamma = 0.005;
  Index k = dynamic_k(1000, 200, 0.5);
  double target = static_cast<double>(k) * 100.0;
  double total = 0.0;
  int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    params.seed = s;
    total += static_cast<double>(truncate_matrix(m, params).nnz());
  }
  double mean = total / seeds;
  CHECK(mean > 0.8 * target);
  CHECK(mean < 1.2 * target);
}

TEST_CASE("mc estimates are deterministic, dangling-safe, and 1/K-quantized") {
  Schema schema({"A", "B"}, {{"AB", "A", "B", false}});
  auto g = build_graph(schema, {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}, {"b2", "B"}},
                       {{"a1", "b1", "AB", 1.0}, {"a1", "b2", "AB", 1.0}});
  auto p = parse_path("A-B", schema);
  McParams params;
  params.walkers = 64;
  params.seed = 9;
  auto pm1 = mc_estimate_pm(g, p, params);
  auto pm2 = mc_estimate_pm(g, p, params);
  CHECK(pm1.matrix.max_abs_diff(pm2.matrix) == 0.0);
  CHECK(pm1.matrix.row_nnz(1) == 0);  // dangling source
  for (const Coo& e : pm1.matrix.to_coo()) {
    double scaled = e.value * 64.0;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
  }
  for (double s : pm1.matrix.row_l1_norms()) CHECK(s <= 1.0 + 1e-9);
  params.seed = 10;
  auto pm3 = mc_estimate_pm(g, p, params);
  CHECK(pm3.matrix.max_abs_diff(pm1.matrix) > 0.0);  // seed matters
}

TEST_CASE("mc estimate converges to the transition matrix on the worked example") {
  auto g = tg1();
  auto p = parse_path("A-B", g.schema());
  McParams params;
  params.walkers = 100000;
  params.seed = 12345;
  auto pm = mc_estimate_pm(g, p, params);
  auto exact = reachable_matrix(g, p);
  CHECK(pm.matrix.max_abs_diff(exact.matrix) <= 0.01);
}

TEST_CASE("mc error shrinks with K") {
  std::mt19937_64 rng(79);
  testsupport::RandomHinOptions opt;
  opt.max_types = 2;
  opt.max_nodes = 12;
  auto g = testsupport::random_graph(rng, opt);
  auto p = testsupport::random_path(rng, g.schema(), 2);
  auto exact = reachable_matrix(g, p);

  auto mean_error = [&](Index walkers) {
    double total = 0.0;
    int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
      McParams params;
      params.walkers = walkers;
      params.seed = 1000 + s;
      auto est = mc_estimate_pm(g, p, params);
      auto diff_rows = exact.matrix.rows();
      double err = 0.0;
      for (Index r = 0; r < diff_rows; ++r) {
        for (Index c = 0; c < exact.matrix.cols(); ++c)
          err += std::abs(est.matrix.at(r, c) - exact.matrix.at(r, c));
      }
      total += err / static_cast<double>(diff_rows);
    }
    return total / seeds;
  };
  double err_small = mean_error(250);
  double err_large = mean_error(4000);
  CHECK(err_large < err_small);
}

TEST_CASE("hetesim_mc with a huge K reproduces the exact scores") {
  auto g = tg1();
  for (const char* text : {"A-B", "A-B-A"}) {
    auto p = parse_path(text, g.schema());
    McParams params;
    params.walkers = 1000000;
    params.seed = 7;
    auto mc = hetesim_mc(g, p, params);
    auto exact = hetesim_scores(g, p);
    CHECK(mc.scores.max_abs_diff(exact.scores) <= 0.01);
  }
}

TEST_CASE("mc honors edge weights in the sampling distribution") {
  Schema schema({"A", "B"}, {{"AB", "A", "B", true}});
  auto g = build_graph(schema, {{"a1", "A"}, {"b1", "B"}, {"b2", "B"}, {"b3", "B"}},
                       {{"a1", "b1", "AB", 6.0}, {"a1", "b2", "AB", 3.0}, {"a1", "b3", "AB", 1.0}});
  auto p = parse_path("A-B", schema);
  McParams params;
  params.walkers = 200000;
  params.seed = 21;
  auto est = mc_estimate_pm(g, p, params);
  CHECK(est.matrix.at(0, 0) == doctest::Approx(0.6).epsilon(0.02));
  CHECK(est.matrix.at(0, 1) == doctest::Approx(0.3).epsilon(0.02));
  CHECK(est.matrix.at(0, 2) == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("hetesim_mc converges on weighted odd paths (sqrt-weight half steps)") {
  std::mt19937_64 rng(101);
  testsupport::RandomHinOptions opt;
  opt.max_types = 2;
  opt.max_nodes = 8;
  opt.weighted = true;
  auto g = testsupport::random_graph(rng, opt);
  auto p = testsupport::random_path(rng, g.schema(), 3);  // odd: middle splits at E
  McParams params;
  params.walkers = 400000;
  params.seed = 31;
  auto mc = hetesim_mc(g, p, params);
  auto exact = hetesim_scores(g, p);
  CHECK(mc.scores.max_abs_diff(exact.scores) <= 0.02);
}

TEST_CASE("hetesim_mc is reproducible and nearly symmetric under matched seeds") {
  std::mt19937_64 rng(83);
  testsupport::RandomHinOptions opt;
  opt.max_types = 3;
  opt.max_nodes = 10;
  auto g = testsupport::random_graph(rng, opt);
  for (int len : {2, 3}) {
    auto p = testsupport::random_path(rng, g.schema(), len);
    auto rp = reverse(g.schema(), p);
    McParams params;
    params.walkers = 400;
    params.seed = 99;
    auto fwd = hetesim_mc(g, p, params);
    auto fwd2 = hetesim_mc(g, p, params);
    CHECK(fwd.scores.max_abs_diff(fwd2.scores) == 0.0);

    auto bwd = hetesim_mc(g, rp, params);
    // Matched seeds replay the same walker streams on the shared halves,
    // so the transposed difference stays well inside the 3-sigma
    // binomial envelope (and is exactly zero with this stream design).
    double sigma_bound = 3.0 / std::sqrt(static_cast<double>(params.walkers));
    CHECK(fwd.scores.max_abs_diff(bwd.scores.transposed()) <= sigma_bound);
  }
}

TEST_CASE("truncated and hybrid degenerate to exact/dp when W covers every type") {
  std::mt19937_64 rng(89);
  auto g = testsupport::random_graph(rng);
  auto p = testsupport::random_path(rng, g.schema(), 4);
  TruncationParams params;
  params.top_w = 1000;  // larger than any type
  auto exact = hetesim_scores(g, p);
  auto trunc = hetesim_truncated(g, p, params);
  auto hybrid = hetesim_hybrid(g, p, params);
  CHECK(max_rel_diff(trunc.scores, exact.scores) < 1e-9);
  CHECK(max_rel_diff(hybrid.scores, exact.scores) < 1e-9);
}

TEST_CASE("hybrid recall is at least truncation recall on a mixing fixture") {
  // The strategies only differ once a half-chain has more than one
  // product, so use a length-6 path (3 steps per half).
  auto ds = make_bench(5, 300, 12, 400);
  auto g = ds.build();
  auto p = parse_path("A-B-A-B-A-B-A", g.schema());
  TruncationParams params;
  params.top_w = 80;
  params.beta = 0.5;
  params.gamma = 0.05;
  auto exact = hetesim_scores(g, p);
  auto trunc = hetesim_truncated(g, p, params);
  auto hybrid = hetesim_hybrid(g, p, params);
  const auto& ids = g.node_ids(p.target_type());
  double recall_trunc = matrix_recall_at_k(exact.scores, trunc.scores, 100, ids);
  double recall_hybrid = matrix_recall_at_k(exact.scores, hybrid.scores, 100, ids);
  CHECK(recall_hybrid >= recall_trunc);
  CHECK(recall_trunc >= 0.8);  // regression floor frozen from this fixture
}

TEST_CASE("strategy outputs stay within the normalized range") {
  std::mt19937_64 rng(97);
  auto g = testsupport::random_graph(rng);
  auto p = testsupport::random_symmetric_path(rng, g.schema(), 2);
  TruncationParams tparams;
  tparams.top_w = 5;
  tparams.gamma = 0.5;
  McParams mparams;
  mparams.walkers = 200;
  for (const RelevanceResult& r :
       {hetesim_dp(g, p), hetesim_truncated(g, p, tparams), hetesim_hybrid(g, p, tparams),
        hetesim_mc(g, p, mparams)}) {
    for (const Coo& e : r.scores.to_coo()) {
      CHECK(e.value >= 0.0);
      CHECK(e.value <= 1.0);
    }
  }
}

TEST_CASE("parameter validation") {
  TruncationParams bad;
  bad.top_w = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.beta = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.gamma = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  McParams mbad;
  mbad.walkers = 0;
  CHECK_THROWS_AS(mbad.validate(), Error);
}
