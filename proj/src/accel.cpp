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

#include "hetesim/accel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hetesim/errors.hpp"
#include "hetesim/parallel.hpp"
#include "hetesim/rng.hpp"

namespace hetesim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

// --- chain ordering --------------------------------------------------------

ChainPlan chain_order(std::span<const std::pair<Index, Index>> dims) {
  Index n = static_cast<Index>(dims.size());
  if (n == 0) raise(ErrorKind::InvalidArgument, "empty chain");
  for (Index i = 0; i + 1 < n; ++i)
    if (dims[i].second != dims[i + 1].first)
      raise(ErrorKind::DimensionMismatch, "chain dimensions do not line up at position " +
                                              std::to_string(i));
  std::vector<Index> p(n + 1);
  p[0] = dims[0].first;
  for (Index i = 0; i < n; ++i) p[i + 1] = dims[i].second;

  ChainPlan plan;
  plan.size = n;
  plan.split.assign(n, std::vector<Index>(n, 0));
  std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n, 0));
  for (Index len = 2; len <= n; ++len) {
    for (Index i = 0; i + len <= n; ++i) {
      Index j = i + len - 1;
      std::int64_t best = -1;
      for (Index k = i; k < j; ++k) {
        std::int64_t c = cost[i][k] + cost[k + 1][j] +
                         static_cast<std::int64_t>(p[i]) * p[k + 1] * p[j + 1];
        if (best < 0 || c < best) {
          best = c;
          plan.split[i][j] = k;
        }
      }
      cost[i][j] = best;
    }
  }
  plan.total_cost = cost[0][n - 1];
  return plan;
}

// --- sub-chain cache ---------------------------------------------------------

SubChainCache::SubChainCache(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

std::shared_ptr<const SparseMatrix> SubChainCache::get(const std::string& key) {
  std::lock_guard lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) {
    ++misses_;
    return nullptr;
  }
  ++hits_;
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->second;
}

void SubChainCache::put(const std::string& key, SparseMatrix value) {
  std::lock_guard lock(mu_);
  auto it = index_.find(key);
  if (it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  lru_.emplace_front(key, std::make_shared<const SparseMatrix>(std::move(value)));
  index_[key] = lru_.begin();
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::size_t SubChainCache::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::size_t SubChainCache::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

std::size_t SubChainCache::size() const {
  std::lock_guard lock(mu_);
  return lru_.size();
}

void SubChainCache::clear() {
  std::lock_guard lock(mu_);
  lru_.clear();
  index_.clear();
  hits_ = misses_ = 0;
}

SubChainCache& global_subchain_cache() {
  static SubChainCache cache(64);
  return cache;
}

namespace {

std::string join_keys(std::span<const std::string> keys, Index i, Index j) {
  std::string out;
  for (Index k = i; k <= j; ++k) {
    if (k > i) out += '.';
    out += keys[k];
  }
  return out;
}

std::shared_ptr<const SparseMatrix> eval_chain(std::span<const SparseMatrix> ms,
                                               std::span<const std::string> keys,
                                               const ChainPlan& plan, SubChainCache* cache,
                                               const std::string& prefix, PhaseStats* stats,
                                               Index i, Index j) {
  if (i == j) return std::shared_ptr<const SparseMatrix>(&ms[i], [](const SparseMatrix*) {});
  std::string key;
  if (cache) {
    key = prefix + join_keys(keys, i, j);
    if (auto hit = cache->get(key)) return hit;
  }
  Index k = plan.split[i][j];
  auto left = eval_chain(ms, keys, plan, cache, prefix, stats, i, k);
  auto right = eval_chain(ms, keys, plan, cache, prefix, stats, k + 1, j);
  auto product = std::make_shared<const SparseMatrix>(multiply(*left, *right));
  if (stats) stats->intermediate_nnz.push_back(product->nnz());
  if (cache) cache->put(key, *product);
  return product;
}

}  // namespace

SparseMatrix multiply_chain(std::span<const SparseMatrix> matrices,
                            std::span<const std::string> keys, const ChainPlan& plan,
                            SubChainCache* cache, const std::string& key_prefix,
                            PhaseStats* stats) {
  if (static_cast<Index>(matrices.size()) != plan.size)
    raise(ErrorKind::DimensionMismatch, "plan size does not match matrix count");
  if (keys.size() != matrices.size())
    raise(ErrorKind::InvalidArgument, "one key per matrix required");
  auto result =
      eval_chain(matrices, keys, plan, cache, key_prefix, stats, 0, plan.size - 1);
  return *result;
}

// --- truncation --------------------------------------------------------------

void TruncationParams::validate() const {
  if (top_w < 1) raise(ErrorKind::InvalidArgument, "W must be >= 1");
  if (!(beta >= 0.0 && beta <= 1.0)) raise(ErrorKind::InvalidArgument, "beta must be in [0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) raise(ErrorKind::InvalidArgument, "gamma must be in (0,1]");
}

std::string TruncationParams::render() const {
  std::ostringstream os;
  os << "W=" << top_w << " beta=" << beta << " gamma=" << gamma << " seed=" << seed;
  return os.str();
}

Index dynamic_k(Index cols, Index top_w, double beta) {
  if (cols <= top_w) return cols;
  return static_cast<Index>(std::floor(std::pow(static_cast<double>(cols - top_w), beta))) + top_w;
}

SparseMatrix truncate_matrix(const SparseMatrix& m, const TruncationParams& params) {
  params.validate();
  Index k = dynamic_k(m.cols(), params.top_w, params.beta);
  if (k >= m.cols()) return m;
  std::int64_t target_keep = static_cast<std::int64_t>(k) * m.rows();
  if (m.nnz() <= target_keep) return m;

  auto values = m.values();
  std::int64_t sample_size =
      static_cast<std::int64_t>(std::ceil(params.gamma * static_cast<double>(m.nnz())));
  double epsilon;
  if (sample_size < 10) {
    // Exact selection: the target_keep-th largest nonzero is the cut.
    std::vector<double> sorted(values.begin(), values.end());
    std::nth_element(sorted.begin(), sorted.begin() + (target_keep - 1), sorted.end(),
                     std::greater<>());
    epsilon = sorted[target_keep - 1];
  } else {
    // Uniform sample of nonzeros; the top k/L-proportional sample value
    // estimates the whole-matrix top-(k*M) threshold.
    CounterRng rng = CounterRng::substream(params.seed, 0x7472756e63ULL, m.nnz(), m.cols());
    std::vector<double> sample(sample_size);
    for (auto& v : sample) v = values[rng.next_below(static_cast<std::uint64_t>(m.nnz()))];
    double keep_fraction = static_cast<double>(k) / static_cast<double>(m.cols());
    std::int64_t rank = static_cast<std::int64_t>(
        std::ceil(keep_fraction * static_cast<double>(sample_size)));
    rank = std::clamp<std::int64_t>(rank, 1, sample_size);
    std::nth_element(sample.begin(), sample.begin() + (rank - 1), sample.end(), std::greater<>());
    epsilon = sample[rank - 1];
  }
  return m.thresholded(epsilon);
}

// --- Monte Carlo -------------------------------------------------------------

void McParams::validate() const {
  if (walkers < 1) raise(ErrorKind::InvalidArgument, "K must be >= 1");
}

std::string McParams::render() const {
  std::ostringstream os;
  os << "K=" << walkers << " seed=" << seed;
  return os.str();
}

namespace {

// One walk step prepared for sampling: candidate bins with cumulative
// weights per source row. For half steps into the edge-object space the
// bin is the edge ordinal in the middle relation's stored orientation.
struct StepSampler {
  std::vector<Index> row_ptr;
  std::vector<Index> bins;
  std::vector<double> cum;  // cumulative weights within each row
  Index bin_count = 0;

  // Returns -1 when the row has no candidates (walk terminates).
  Index sample(Index row, CounterRng& rng) const {
    Index begin = row_ptr[row], end = row_ptr[row + 1];
    if (begin == end) return -1;
    double total = cum[end - 1];
    double r = rng.next_unit() * total;
    auto it = std::upper_bound(cum.begin() + begin, cum.begin() + end, r);
    Index k = std::min<Index>(end - 1, static_cast<Index>(it - cum.begin()));
    return bins[k];
  }
};

StepSampler sampler_from_rows(const SparseMatrix& w, bool bins_are_ordinals, bool sqrt_weights) {
  StepSampler s;
  s.row_ptr.assign(w.row_ptr().begin(), w.row_ptr().end());
  s.bins.resize(w.nnz());
  s.cum.resize(w.nnz());
  for (Index r = 0; r < w.rows(); ++r) {
    auto cols = w.row_cols(r);
    auto vals = w.row_vals(r);
    double acc = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      Index pos = s.row_ptr[r] + static_cast<Index>(k);
      acc += sqrt_weights ? std::sqrt(vals[k]) : vals[k];
      s.bins[pos] = bins_are_ordinals ? pos : cols[k];
      s.cum[pos] = acc;
    }
  }
  s.bin_count = bins_are_ordinals ? w.nnz() : w.cols();
  return s;
}

// In-edge sampler: candidates of a target-side node are the edges into
// it, binned by their ordinal in `w`'s row-major storage and ordered by
// source index (row-major traversal preserves that order).
StepSampler sampler_from_cols(const SparseMatrix& w) {
  StepSampler s;
  std::vector<Index> count(w.cols() + 1, 0);
  for (Index c : w.col_indices()) ++count[c + 1];
  for (Index c = 0; c < w.cols(); ++c) count[c + 1] += count[c];
  s.row_ptr = count;
  s.bins.resize(w.nnz());
  std::vector<double> weight(w.nnz());
  std::vector<Index> cursor(count.begin(), count.end() - 1);
  for (Index r = 0; r < w.rows(); ++r) {
    auto cols = w.row_cols(r);
    auto vals = w.row_vals(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      Index ordinal = w.row_ptr()[r] + static_cast<Index>(k);
      Index pos = cursor[cols[k]]++;
      s.bins[pos] = ordinal;
      weight[pos] = std::sqrt(vals[k]);
    }
  }
  s.cum.resize(w.nnz());
  for (Index c = 0; c < w.cols(); ++c) {
    double acc = 0.0;
    for (Index k = s.row_ptr[c]; k < s.row_ptr[c + 1]; ++k) {
      acc += weight[k];
      s.cum[k] = acc;
    }
  }
  s.bin_count = w.nnz();
  return s;
}

struct WalkStep {
  enum class Kind { Relation, HalfSource, HalfTarget };
  Kind kind = Kind::Relation;
  RelationRef rel{};
};

// Key of the walked sequence used to derive walker substreams. Half
// steps are keyed by the base relation and the physical side the walker
// enters the edge space from, so a path and its reverse replay the same
// streams on their shared halves.
std::string walk_key(const Schema& schema, std::span<const WalkStep> steps) {
  std::string key;
  for (const WalkStep& s : steps) {
    if (!key.empty()) key += '.';
    if (s.kind == WalkStep::Kind::Relation) {
      key += to_string(schema, s.rel);
      continue;
    }
    bool enters_from_source =
        (s.rel.kind != RelationRef::Kind::Inverse) == (s.kind == WalkStep::Kind::HalfSource);
    if (s.rel.kind == RelationRef::Kind::SelfLoop) {
      key += to_string(schema, s.rel) + ">";
    } else {
      key += schema.relation(s.rel.index).id + (enters_from_source ? ">" : "<");
    }
  }
  return key;
}

SparseMatrix mc_walk(const HinGraph& graph, Index source_type,
                     std::span<const WalkStep> steps, const McParams& params,
                     std::span<const Index> sources) {
  std::vector<StepSampler> samplers;
  samplers.reserve(steps.size());
  for (const WalkStep& s : steps) {
    switch (s.kind) {
      case WalkStep::Kind::Relation:
        samplers.push_back(sampler_from_rows(graph.adjacency(s.rel), false, false));
        break;
      case WalkStep::Kind::HalfSource:
        samplers.push_back(sampler_from_rows(graph.adjacency(s.rel), true, true));
        break;
      case WalkStep::Kind::HalfTarget:
        samplers.push_back(sampler_from_cols(graph.adjacency(s.rel)));
        break;
    }
  }
  Index n_rows = graph.node_count(source_type);
  Index n_cols = steps.empty() ? n_rows : samplers.back().bin_count;

  std::vector<Index> all_sources;
  if (sources.empty()) {
    all_sources.resize(n_rows);
    std::iota(all_sources.begin(), all_sources.end(), Index{0});
    sources = all_sources;
  }

  std::uint64_t key_hash = hash_bytes(walk_key(graph.schema(), steps));
  double inv_k = 1.0 / static_cast<double>(params.walkers);

  std::vector<std::vector<std::pair<Index, double>>> row_entries(n_rows);
  parallel_for(static_cast<Index>(sources.size()), [&](Index begin, Index end) {
    std::vector<double> counts;
    std::vector<Index> touched;
    for (Index si = begin; si < end; ++si) {
      Index src = sources[si];
      counts.assign(n_cols, 0.0);
      touched.clear();
      for (Index walker = 0; walker < params.walkers; ++walker) {
        CounterRng rng = CounterRng::substream(params.seed, key_hash,
                                               static_cast<std::uint64_t>(src),
                                               static_cast<std::uint64_t>(walker));
        Index at = src;
        bool alive = true;
        for (const StepSampler& sampler : samplers) {
          at = sampler.sample(at, rng);
          if (at < 0) {
            alive = false;
            break;
          }
        }
        if (alive) {
          if (counts[at] == 0.0) touched.push_back(at);
          counts[at] += 1.0;
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = row_entries[src];
      row.reserve(touched.size());
      for (Index c : touched) row.emplace_back(c, counts[c] * inv_k);
    }
  });

  std::vector<Index> row_ptr(n_rows + 1, 0);
  for (Index r = 0; r < n_rows; ++r)
    row_ptr[r + 1] = row_ptr[r] + static_cast<Index>(row_entries[r].size());
  std::vector<Index> cols_idx(row_ptr.back());
  std::vector<double> vals(row_ptr.back());
  for (Index r = 0; r < n_rows; ++r) {
    Index k = row_ptr[r];
    for (auto& [c, v] : row_entries[r]) {
      cols_idx[k] = c;
      vals[k] = v;
      ++k;
    }
  }
  return SparseMatrix::from_csr(n_rows, n_cols, std::move(row_ptr), std::move(cols_idx),
                                std::move(vals));
}

}  // namespace

ProbMatrix mc_estimate_pm(const HinGraph& graph, const MetaPath& path, const McParams& params,
                          std::span<const Index> sources) {
  params.validate();
  validate_path_on(graph.schema(), path);
  std::vector<WalkStep> steps;
  steps.reserve(path.length());
  for (const RelationRef& r : path.steps())
    steps.push_back({WalkStep::Kind::Relation, r});
  SparseMatrix pm = mc_walk(graph, path.source_type(), steps, params, sources);
  return ProbMatrix{std::move(pm), path.source_type(),
                    TargetSpace::node_type(path.target_type()),
                    to_string(graph.schema(), path)};
}

// --- strategy front-ends -------------------------------------------------

namespace {

std::vector<std::pair<Index, Index>> chain_dims(const HinGraph& graph,
                                                std::span<const RelationRef> steps) {
  std::vector<std::pair<Index, Index>> dims;
  dims.reserve(steps.size());
  for (const RelationRef& s : steps)
    dims.emplace_back(graph.node_count(source_type_of(graph.schema(), s)),
                      graph.node_count(target_type_of(graph.schema(), s)));
  return dims;
}

std::vector<std::string> chain_keys(const Schema& schema, std::span<const RelationRef> steps) {
  std::vector<std::string> keys;
  keys.reserve(steps.size());
  for (const RelationRef& s : steps) keys.push_back(to_string(schema, s));
  return keys;
}

SparseMatrix dp_side(const HinGraph& graph, std::span<const RelationRef> steps,
                     Index fallback_dim, SubChainCache* cache, PhaseStats* stats) {
  if (steps.empty()) return SparseMatrix::identity(fallback_dim);
  auto chain = detail::transition_chain(graph, steps);
  if (chain.size() == 1) return chain.front();
  auto plan = chain_order(chain_dims(graph, steps));
  auto keys = chain_keys(graph.schema(), steps);
  std::string prefix = "g" + std::to_string(graph.uid()) + ":";
  return multiply_chain(chain, keys, plan, cache, prefix, stats);
}

SparseMatrix truncated_side(const HinGraph& graph, std::span<const RelationRef> steps,
                            Index fallback_dim, const TruncationParams& params,
                            PhaseStats* stats) {
  SparseMatrix acc = steps.empty() ? SparseMatrix::identity(fallback_dim)
                                   : graph.transition_row(steps[0]).matrix;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    acc = truncate_matrix(multiply(acc, graph.transition_row(steps[i]).matrix), params);
    if (stats) stats->intermediate_nnz.push_back(acc.nnz());
  }
  // The final half matrix is truncated even when the chain had no
  // products (single step or identity).
  if (steps.size() <= 1) {
    acc = truncate_matrix(acc, params);
    if (stats) stats->intermediate_nnz.push_back(acc.nnz());
  }
  return acc;
}

RelevanceResult assemble_result(const HinGraph& graph, const MetaPath& path,
                                const DecomposedPath& d, const SparseMatrix& left,
                                const SparseMatrix& right, bool normalized, Strategy strategy,
                                std::string params, PhaseStats stats) {
  RelevanceResult result;
  result.path = to_string(graph.schema(), path);
  result.normalized = normalized;
  result.strategy = strategy;
  result.params = std::move(params);
  result.stats = std::move(stats);
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

RelevanceResult hetesim_dp(const HinGraph& graph, const MetaPath& path, bool normalized,
                           SubChainCache* cache) {
  validate_path_on(graph.schema(), path);
  DecomposedPath d = decompose(graph.schema(), path);
  PhaseStats stats;
  auto mul_start = Clock::now();
  SparseMatrix left =
      dp_side(graph, d.left, graph.node_count(path.source_type()), cache, &stats);
  auto right_steps = d.right_reversed();
  SparseMatrix right =
      dp_side(graph, right_steps, graph.node_count(path.target_type()), cache, &stats);
  stats.mul_seconds = seconds_since(mul_start);
  return assemble_result(graph, path, d, left, right, normalized, Strategy::dp, "",
                         std::move(stats));
}

RelevanceResult hetesim_truncated(const HinGraph& graph, const MetaPath& path,
                                  const TruncationParams& params, bool normalized) {
  params.validate();
  validate_path_on(graph.schema(), path);
  DecomposedPath d = decompose(graph.schema(), path);
  PhaseStats stats;
  auto mul_start = Clock::now();
  SparseMatrix left =
      truncated_side(graph, d.left, graph.node_count(path.source_type()), params, &stats);
  auto right_steps = d.right_reversed();
  SparseMatrix right =
      truncated_side(graph, right_steps, graph.node_count(path.target_type()), params, &stats);
  stats.mul_seconds = seconds_since(mul_start);
  return assemble_result(graph, path, d, left, right, normalized, Strategy::truncated,
                         params.render(), std::move(stats));
}

RelevanceResult hetesim_hybrid(const HinGraph& graph, const MetaPath& path,
                               const TruncationParams& params, bool normalized,
                               SubChainCache* cache) {
  params.validate();
  validate_path_on(graph.schema(), path);
  DecomposedPath d = decompose(graph.schema(), path);
  PhaseStats stats;
  auto mul_start = Clock::now();
  SparseMatrix left =
      truncate_matrix(dp_side(graph, d.left, graph.node_count(path.source_type()), cache, &stats),
                      params);
  auto right_steps = d.right_reversed();
  SparseMatrix right = truncate_matrix(
      dp_side(graph, right_steps, graph.node_count(path.target_type()), cache, &stats), params);
  stats.intermediate_nnz.push_back(left.nnz());
  stats.intermediate_nnz.push_back(right.nnz());
  stats.mul_seconds = seconds_since(mul_start);
  return assemble_result(graph, path, d, left, right, normalized, Strategy::hybrid,
                         params.render(), std::move(stats));
}

RelevanceResult hetesim_mc(const HinGraph& graph, const MetaPath& path, const McParams& params,
                           bool normalized) {
  params.validate();
  validate_path_on(graph.schema(), path);
  DecomposedPath d = decompose(graph.schema(), path);

  std::vector<WalkStep> left_steps, right_steps;
  for (const RelationRef& r : d.left) left_steps.push_back({WalkStep::Kind::Relation, r});
  for (const RelationRef& r : d.right_reversed())
    right_steps.push_back({WalkStep::Kind::Relation, r});
  if (d.odd()) {
    left_steps.push_back({WalkStep::Kind::HalfSource, *d.middle_relation});
    right_steps.push_back({WalkStep::Kind::HalfTarget, *d.middle_relation});
  }

  PhaseStats stats;
  auto mul_start = Clock::now();
  SparseMatrix left = mc_walk(graph, path.source_type(), left_steps, params, {});
  SparseMatrix right = mc_walk(graph, path.target_type(), right_steps, params, {});
  stats.intermediate_nnz.push_back(left.nnz());
  stats.intermediate_nnz.push_back(right.nnz());
  stats.mul_seconds = seconds_since(mul_start);

  // Both estimates live in the same middle space (node type or edge
  // ordinals), so the relevance phase is the plain cosine product.
  RelevanceResult result;
  result.path = to_string(graph.schema(), path);
  result.normalized = normalized;
  result.strategy = Strategy::monte_carlo;
  result.params = params.render();
  result.stats = std::move(stats);
  auto rel_start = Clock::now();
  result.scores = detail::scores_from_sides(left, right, nullptr, normalized);
  result.stats.rel_seconds = seconds_since(rel_start);
  return result;
}

}  // namespace hetesim
