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
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hetesim/engine.hpp"

namespace hetesim {

/// Optimal multiplication order for a compatible matrix chain, from the
/// expected-cost recurrence
///   cost(i..j) = min_k cost(i..k) + cost(k+1..j) + p_i * p_{k+1} * p_{j+1}
/// solved by dynamic programming over all O(l^2) sub-chains.
struct ChainPlan {
  Index size = 0;                          // number of matrices in the chain
  std::vector<std::vector<Index>> split;   // split[i][j]: last k of the left part of [i..j]
  std::int64_t total_cost = 0;             // scalar multiplications under the plan
};

/// dims[i] = (rows, cols) of the i-th matrix. Throws DimensionMismatch
/// when consecutive dimensions do not chain.
ChainPlan chain_order(std::span<const std::pair<Index, Index>> dims);

/// Bounded LRU store for sub-chain products, keyed by canonical
/// relation-id sequences (callers namespace keys per graph). Thread-safe;
/// lookups and insertions take the same lock.
class SubChainCache {
 public:
  explicit SubChainCache(std::size_t capacity = 64);

  std::shared_ptr<const SparseMatrix> get(const std::string& key);
  void put(const std::string& key, SparseMatrix value);

  std::size_t hits() const;
  std::size_t misses() const;
  std::size_t size() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::list<std::pair<std::string, std::shared_ptr<const SparseMatrix>>> lru_;
  std::unordered_map<std::string, decltype(lru_)::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

/// Process-wide cache shared by the dp and hybrid strategies.
SubChainCache& global_subchain_cache();

/// Evaluates the chain under `plan`. `keys[i]` names matrix i (canonical
/// relation spelling); sub-chain cache entries are keyed
/// `prefix + keys[i..j]` so duplicate sub-paths are computed once per
/// process run. Pass cache = nullptr to disable reuse.
SparseMatrix multiply_chain(std::span<const SparseMatrix> matrices,
                            std::span<const std::string> keys, const ChainPlan& plan,
                            SubChainCache* cache, const std::string& key_prefix = "",
                            PhaseStats* stats = nullptr);

/// Truncation knobs. W is the top-object count users care about; beta
/// bends the dynamic top-k rule for very wide matrices; gamma is the
/// fraction of nonzeros sampled when estimating the cut threshold.
struct TruncationParams {
  Index top_w = 200;
  double beta = 0.5;
  double gamma = 0.005;
  std::uint64_t seed = 0;

  void validate() const;
  std::string render() const;
};

/// The dynamic top-k rule: k = L when L <= W, else floor((L-W)^beta) + W.
Index dynamic_k(Index cols, Index top_w, double beta);

/// Zeroes every entry below a threshold chosen so roughly k*M entries
/// survive, where k follows the dynamic rule and M is the row count. The
/// threshold is the top-(k*M)-proportional value of a uniform sample of
/// ceil(gamma * nnz) nonzeros; samples smaller than 10 fall back to exact
/// selection over all nonzeros. Never creates entries, never increases
/// one.
SparseMatrix truncate_matrix(const SparseMatrix& m, const TruncationParams& params);

/// Monte Carlo knobs: K independent walkers per source node, with
/// counter-based substreams so results are reproducible for a given seed
/// regardless of thread scheduling.
struct McParams {
  Index walkers = 500;
  std::uint64_t seed = 0;

  void validate() const;
  std::string render() const;
};

/// Estimates the reachable-probability matrix of the whole path by
/// releasing K walkers per source. Entries are visit counts divided by K;
/// a walker stopping at a dangling node contributes nothing.
ProbMatrix mc_estimate_pm(const HinGraph& graph, const MetaPath& path, const McParams& params,
                          std::span<const Index> sources = {});

// --- Strategy front-ends --------------------------------------------------
//
// All four return the same RelevanceResult shape as the exact engine with
// strategy/params provenance filled in.

/// Information-lossless: identical scores, only the multiplication order
/// and sub-chain reuse differ.
RelevanceResult hetesim_dp(const HinGraph& graph, const MetaPath& path, bool normalized = true,
                           SubChainCache* cache = &global_subchain_cache());

/// Truncates after every intermediate product in both halves and after
/// the final half matrices, keeping everything sparse at some accuracy
/// cost.
RelevanceResult hetesim_truncated(const HinGraph& graph, const MetaPath& path,
                                  const TruncationParams& params, bool normalized = true);

/// dp multiplication order, then one truncation of the two final half
/// matrices just before the relevance phase.
RelevanceResult hetesim_hybrid(const HinGraph& graph, const MetaPath& path,
                               const TruncationParams& params, bool normalized = true,
                               SubChainCache* cache = &global_subchain_cache());

/// Both half matrices estimated by random walkers, then the exact
/// relevance phase applied to the estimates.
RelevanceResult hetesim_mc(const HinGraph& graph, const MetaPath& path, const McParams& params,
                           bool normalized = true);

}  // namespace hetesim
