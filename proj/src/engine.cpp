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

#include "hetesim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include "hetesim/errors.hpp"

namespace hetesim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::exact: return "exact";
    case Strategy::dp: return "dp";
    case Strategy::truncated: return "truncated";
    case Strategy::hybrid: return "hybrid";
    case Strategy::monte_carlo: return "mc";
  }
  return "?";
}

Index PhaseStats::peak_intermediate_nnz() const {
  Index peak = 0;
  for (Index n : intermediate_nnz) peak = std::max(peak, n);
  return peak;
}

void validate_path_on(const Schema& schema, const MetaPath& path) {
  for (const RelationRef& step : path.steps()) {
    Index limit = step.kind == RelationRef::Kind::SelfLoop ? schema.type_count()
                                                           : schema.relation_count();
    if (step.index < 0 || step.index >= limit)
      raise(ErrorKind::SchemaMismatch, "path references an unknown relation or type");
  }
  // Re-check the chain on this schema; a path built elsewhere may have
  // indices that happen to be in range but do not line up.
  for (Index i = 0; i + 1 < path.length(); ++i)
    if (target_type_of(schema, path.step(i)) != source_type_of(schema, path.step(i + 1)))
      raise(ErrorKind::SchemaMismatch, "path steps are not concatenable on this schema");
}

namespace detail {

std::vector<SparseMatrix> transition_chain(const HinGraph& graph,
                                           std::span<const RelationRef> steps) {
  std::vector<SparseMatrix> chain;
  chain.reserve(steps.size());
  for (const RelationRef& step : steps) chain.push_back(graph.transition_row(step).matrix);
  return chain;
}

SparseMatrix chain_product_ltr(std::span<const SparseMatrix> chain, Index fallback_dim,
                               PhaseStats* stats) {
  if (chain.empty()) return SparseMatrix::identity(fallback_dim);
  SparseMatrix acc = chain.front();
  for (std::size_t i = 1; i < chain.size(); ++i) {
    acc = multiply(acc, chain[i]);
    if (stats) stats->intermediate_nnz.push_back(acc.nnz());
  }
  return acc;
}

MiddleInfo middle_info(const HinGraph& graph, const RelationRef& middle) {
  const SparseMatrix& w = graph.adjacency(middle);
  SparseMatrix sqrt_w = w.map_values([](double v) { return std::sqrt(v); });
  std::vector<double> row_sqrt = sqrt_w.row_sums();
  std::vector<double> col_sqrt = sqrt_w.col_sums();
  std::vector<double> row_w = w.row_sums();
  std::vector<double> col_w = w.col_sums();

  std::vector<double> row_inv(row_sqrt.size()), col_inv(col_sqrt.size());
  for (std::size_t i = 0; i < row_sqrt.size(); ++i)
    row_inv[i] = row_sqrt[i] > 0.0 ? 1.0 / row_sqrt[i] : 0.0;
  for (std::size_t i = 0; i < col_sqrt.size(); ++i)
    col_inv[i] = col_sqrt[i] > 0.0 ? 1.0 / col_sqrt[i] : 0.0;

  MiddleInfo info;
  info.coupling = w.scaled_rows(row_inv).scaled_cols(col_inv);
  info.left_norm_factors.resize(row_sqrt.size());
  info.right_norm_factors.resize(col_sqrt.size());
  for (std::size_t i = 0; i < row_sqrt.size(); ++i)
    info.left_norm_factors[i] = row_sqrt[i] > 0.0 ? row_w[i] / (row_sqrt[i] * row_sqrt[i]) : 0.0;
  for (std::size_t i = 0; i < col_sqrt.size(); ++i)
    info.right_norm_factors[i] = col_sqrt[i] > 0.0 ? col_w[i] / (col_sqrt[i] * col_sqrt[i]) : 0.0;
  return info;
}

namespace {

std::vector<double> side_norms(const SparseMatrix& side, const std::vector<double>* factors) {
  if (!factors) return side.row_l2_norms();
  std::vector<double> norms(side.rows(), 0.0);
  for (Index r = 0; r < side.rows(); ++r) {
    auto cols = side.row_cols(r);
    auto vals = side.row_vals(r);
    double s = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) s += vals[k] * vals[k] * (*factors)[cols[k]];
    norms[r] = std::sqrt(s);
  }
  return norms;
}

}  // namespace

SparseMatrix scores_from_sides(const SparseMatrix& left, const SparseMatrix& right,
                               const MiddleInfo* middle, bool normalized) {
  SparseMatrix raw = middle ? multiply_abt(multiply(left, middle->coupling), right)
                            : multiply_abt(left, right);
  if (!normalized) return raw;

  std::vector<double> lnorm = side_norms(left, middle ? &middle->left_norm_factors : nullptr);
  std::vector<double> rnorm = side_norms(right, middle ? &middle->right_norm_factors : nullptr);
  for (double& v : lnorm) v = v > 0.0 ? 1.0 / v : 0.0;
  for (double& v : rnorm) v = v > 0.0 ? 1.0 / v : 0.0;
  SparseMatrix cos = raw.scaled_rows(lnorm).scaled_cols(rnorm);
  // Roundoff guard: cosine of nonnegative vectors lies in [0, 1].
  return cos.map_values([](double v) { return std::min(v, 1.0); });
}

std::pair<SparseMatrix, SparseMatrix> decompose_relation_matrices(const SparseMatrix& w) {
  Index e = 0;
  std::vector<Coo> out_entries, in_entries;
  out_entries.reserve(w.nnz());
  in_entries.reserve(w.nnz());
  for (Index r = 0; r < w.rows(); ++r) {
    auto cols = w.row_cols(r);
    auto vals = w.row_vals(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      double s = std::sqrt(vals[k]);
      out_entries.push_back({r, e, s});
      in_entries.push_back({e, cols[k], s});
      ++e;
    }
  }
  return {SparseMatrix::from_coo(w.rows(), e, std::move(out_entries)),
          SparseMatrix::from_coo(e, w.cols(), std::move(in_entries))};
}

}  // namespace detail

ProbMatrix reachable_matrix(const HinGraph& graph, const MetaPath& path) {
  validate_path_on(graph.schema(), path);
  auto chain = detail::transition_chain(graph, path.steps());
  SparseMatrix pm = detail::chain_product_ltr(chain, graph.node_count(path.source_type()), nullptr);
  return ProbMatrix{std::move(pm), path.source_type(), TargetSpace::node_type(path.target_type()),
                    to_string(graph.schema(), path)};
}

namespace {

RelevanceResult hetesim_impl(const HinGraph& graph, const MetaPath& path, bool normalized) {
  validate_path_on(graph.schema(), path);
  DecomposedPath d = decompose(graph.schema(), path);

  RelevanceResult result;
  result.path = to_string(graph.schema(), path);
  result.normalized = normalized;
  result.strategy = Strategy::exact;

  auto mul_start = Clock::now();
  auto left_chain = detail::transition_chain(graph, d.left);
  auto right_chain = detail::transition_chain(graph, d.right_reversed());
  SparseMatrix left = detail::chain_product_ltr(left_chain, graph.node_count(path.source_type()),
                                                &result.stats);
  SparseMatrix right = detail::chain_product_ltr(right_chain, graph.node_count(path.target_type()),
                                                 &result.stats);
  result.stats.mul_seconds = seconds_since(mul_start);

  auto rel_start = Clock::now();
  if (d.odd()) {
    detail::MiddleInfo info = detail::middle_info(graph, *d.middle_relation);
    result.scores = detail::scores_from_sides(left, right, &info, normalized);
  } else {
    result.scores = detail::scores_from_sides(left, right, nullptr, normalized);
  }
  result.stats.rel_seconds = seconds_since(rel_start);
  return result;
}

}  // namespace

RelevanceResult hetesim_scores(const HinGraph& graph, const MetaPath& path, bool normalized) {
  return hetesim_impl(graph, path, normalized);
}

RelevanceResult hetesim_raw(const HinGraph& graph, const MetaPath& path) {
  return hetesim_impl(graph, path, false);
}

namespace {

// Row walk: distribution over the current type, advanced one step by the
// row-normalized adjacency of `step`.
std::vector<double> advance_row(const HinGraph& graph, const std::vector<double>& v,
                                const RelationRef& step) {
  const SparseMatrix& w = graph.adjacency(step);
  auto sums = w.row_sums();
  std::vector<double> out(w.cols(), 0.0);
  for (Index u = 0; u < w.rows(); ++u) {
    if (v[u] == 0.0 || sums[u] <= 0.0) continue;
    double scale = v[u] / sums[u];
    auto cols = w.row_cols(u);
    auto vals = w.row_vals(u);
    for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] += scale * vals[k];
  }
  return out;
}

std::vector<double> walk_rows(const HinGraph& graph, Index source_type, Index source,
                              std::span<const RelationRef> steps) {
  std::vector<double> v(graph.node_count(source_type), 0.0);
  v[source] = 1.0;
  for (const RelationRef& step : steps) v = advance_row(graph, v, step);
  return v;
}

}  // namespace

double hetesim_pair(const HinGraph& graph, const MetaPath& path, std::string_view source_id,
                    std::string_view target_id, bool normalized) {
  validate_path_on(graph.schema(), path);
  Index a = graph.node_index(path.source_type(), source_id);
  Index b = graph.node_index(path.target_type(), target_id);
  DecomposedPath d = decompose(graph.schema(), path);

  std::vector<double> lv = walk_rows(graph, path.source_type(), a, d.left);
  std::vector<double> rv = walk_rows(graph, path.target_type(), b, d.right_reversed());

  double dot = 0.0, lsq = 0.0, rsq = 0.0;
  if (d.odd()) {
    detail::MiddleInfo info = detail::middle_info(graph, *d.middle_relation);
    for (Index u = 0; u < info.coupling.rows(); ++u) {
      if (lv[u] == 0.0) continue;
      auto cols = info.coupling.row_cols(u);
      auto vals = info.coupling.row_vals(u);
      for (std::size_t k = 0; k < cols.size(); ++k) dot += lv[u] * vals[k] * rv[cols[k]];
    }
    for (std::size_t u = 0; u < lv.size(); ++u) lsq += lv[u] * lv[u] * info.left_norm_factors[u];
    for (std::size_t v = 0; v < rv.size(); ++v) rsq += rv[v] * rv[v] * info.right_norm_factors[v];
  } else {
    for (std::size_t m = 0; m < lv.size(); ++m) dot += lv[m] * rv[m];
    for (double x : lv) lsq += x * x;
    for (double x : rv) rsq += x * x;
  }
  if (!normalized) return dot;
  if (lsq == 0.0 || rsq == 0.0) return 0.0;
  return std::min(dot / (std::sqrt(lsq) * std::sqrt(rsq)), 1.0);
}

std::vector<double> hetesim_row(const HinGraph& graph, const MetaPath& path,
                                std::string_view source_id, bool normalized) {
  validate_path_on(graph.schema(), path);
  Index a = graph.node_index(path.source_type(), source_id);
  DecomposedPath d = decompose(graph.schema(), path);

  std::vector<double> lv = walk_rows(graph, path.source_type(), a, d.left);
  auto right_chain = detail::transition_chain(graph, d.right_reversed());
  SparseMatrix right =
      detail::chain_product_ltr(right_chain, graph.node_count(path.target_type()), nullptr);

  Index n_targets = graph.node_count(path.target_type());
  std::vector<double> scores(n_targets, 0.0);
  double lsq = 0.0;
  std::vector<double> rnorm;
  if (d.odd()) {
    detail::MiddleInfo info = detail::middle_info(graph, *d.middle_relation);
    // Fold the source row through the coupling, then dot against each
    // target's walk row.
    std::vector<double> folded(info.coupling.cols(), 0.0);
    for (Index u = 0; u < info.coupling.rows(); ++u) {
      if (lv[u] == 0.0) continue;
      auto cols = info.coupling.row_cols(u);
      auto vals = info.coupling.row_vals(u);
      for (std::size_t k = 0; k < cols.size(); ++k) folded[cols[k]] += lv[u] * vals[k];
    }
    for (Index b = 0; b < n_targets; ++b) {
      auto cols = right.row_cols(b);
      auto vals = right.row_vals(b);
      for (std::size_t k = 0; k < cols.size(); ++k) scores[b] += folded[cols[k]] * vals[k];
    }
    if (normalized) {
      for (std::size_t u = 0; u < lv.size(); ++u) lsq += lv[u] * lv[u] * info.left_norm_factors[u];
      rnorm.assign(n_targets, 0.0);
      for (Index b = 0; b < n_targets; ++b) {
        auto cols = right.row_cols(b);
        auto vals = right.row_vals(b);
        double s = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k)
          s += vals[k] * vals[k] * info.right_norm_factors[cols[k]];
        rnorm[b] = std::sqrt(s);
      }
    }
  } else {
    for (Index b = 0; b < n_targets; ++b) {
      auto cols = right.row_cols(b);
      auto vals = right.row_vals(b);
      for (std::size_t k = 0; k < cols.size(); ++k) scores[b] += lv[cols[k]] * vals[k];
    }
    if (normalized) {
      for (double x : lv) lsq += x * x;
      rnorm = right.row_l2_norms();
    }
  }
  if (normalized) {
    double lnorm = std::sqrt(lsq);
    for (Index b = 0; b < n_targets; ++b) {
      double denom = lnorm * rnorm[b];
      scores[b] = denom > 0.0 ? std::min(scores[b] / denom, 1.0) : 0.0;
    }
  }
  return scores;
}

namespace {

struct OracleContext {
  const HinGraph& graph;
  std::span<const RelationRef> steps;
  std::map<std::tuple<Index, Index, Index>, double> memo;  // (depth, s, t)

  // Neighbor distribution of `node` under the row-normalized step.
  std::vector<std::pair<Index, double>> out_distribution(const RelationRef& step, Index node) {
    const SparseMatrix& w = graph.adjacency(step);
    auto cols = w.row_cols(node);
    auto vals = w.row_vals(node);
    double sum = 0.0;
    for (double v : vals) sum += v;
    std::vector<std::pair<Index, double>> dist;
    if (sum <= 0.0) return dist;
    dist.reserve(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) dist.emplace_back(cols[k], vals[k] / sum);
    return dist;
  }

  double atomic(const RelationRef& step, Index s, Index t) {
    if (step.kind == RelationRef::Kind::SelfLoop) return s == t ? 1.0 : 0.0;
    // Average mutual influence over the implicit edge objects; with the
    // √w weight split this is w_st / (Σ_v √w_sv · Σ_u √w_ut).
    const SparseMatrix& w = graph.adjacency(step);
    double w_st = w.at(s, t);
    if (w_st == 0.0) return 0.0;
    double row = 0.0, col = 0.0;
    {
      auto vals = w.row_vals(s);
      for (double v : vals) row += std::sqrt(v);
    }
    const SparseMatrix& wt = graph.adjacency(step.inverted());
    {
      auto vals = wt.row_vals(t);
      for (double v : vals) col += std::sqrt(v);
    }
    return w_st / (row * col);
  }

  double eval(Index lo, Index hi, Index s, Index t) {
    if (hi - lo == 0) return s == t ? 1.0 : 0.0;
    if (hi - lo == 1) return atomic(steps[lo], s, t);
    auto key = std::make_tuple(lo, s, t);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    auto outs = out_distribution(steps[lo], s);
    auto ins = out_distribution(steps[hi - 1].inverted(), t);
    double score = 0.0;
    if (!outs.empty() && !ins.empty()) {
      for (auto& [u, pu] : outs)
        for (auto& [v, qv] : ins) score += pu * qv * eval(lo + 1, hi - 1, u, v);
    }
    memo.emplace(key, score);
    return score;
  }
};

}  // namespace

double hetesim_recursive_oracle(const HinGraph& graph, const MetaPath& path,
                                std::string_view source_id, std::string_view target_id) {
  validate_path_on(graph.schema(), path);
  Index a = graph.node_index(path.source_type(), source_id);
  Index b = graph.node_index(path.target_type(), target_id);
  OracleContext ctx{graph, path.steps(), {}};
  return ctx.eval(0, path.length(), a, b);
}

}  // namespace hetesim
