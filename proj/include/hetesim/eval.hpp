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

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "hetesim/sparse.hpp"

namespace hetesim {

struct RankedItem {
  std::string id;
  double score = 0.0;
};

/// Scores in non-increasing order with the engine tie-break (descending
/// score, then ascending id); ids unique.
class RankedList {
 public:
  RankedList() = default;

  /// Sorts the items with the tie-break; throws on duplicate ids.
  static RankedList from_items(std::vector<RankedItem> items);

  const std::vector<RankedItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  /// 1-based rank of an id, or 0 when absent.
  Index rank_of(const std::string& id) const;

 private:
  std::vector<RankedItem> items_;
  std::unordered_map<std::string, Index> rank_;
};

using LabelMap = std::unordered_map<std::string, std::string>;

/// Area under the ROC curve of the binary relevance sequence induced by
/// the ranking; tied scores use the mid-rank convention. Every ranked id
/// must be labeled; single-class inputs are an error, not 0.5.
double auc(const RankedList& ranked, const LabelMap& labels, const std::string& positive);

/// Normalized mutual information between two labelings of the same id
/// set, normalized by the arithmetic mean of the two entropies. Two
/// trivial (zero-entropy) identical partitions score 1.
double nmi(const LabelMap& clustering, const LabelMap& truth);

/// |top-k(exact) ∩ top-k(approx)| / k by id sets. Lists shorter than k
/// contribute their full length; the denominator follows the exact list.
double recall_at_k(const RankedList& exact, const RankedList& approx, Index k);

/// Mean |rank difference| over the top_n items of the ground-truth
/// ranking; items missing from `measure` count as rank len(measure) + 1.
double avg_rank_difference(const RankedList& measure, const RankedList& truth, Index top_n);

/// Ranking of one matrix row: nonzero scores only, engine tie-break.
RankedList ranked_from_row(const SparseMatrix& scores, Index row,
                           const std::vector<std::string>& col_ids);

/// Mean recall_at_k over rows, skipping rows whose exact ranking is
/// empty. The per-row recall the quick-computation accuracy protocol
/// reports.
double matrix_recall_at_k(const SparseMatrix& exact, const SparseMatrix& approx, Index k,
                          const std::vector<std::string>& col_ids);

// TSV interfaces: ranked lists as `id<TAB>score`, labels as `id<TAB>label`.
RankedList read_ranked_tsv(std::istream& in);
LabelMap read_labels_tsv(std::istream& in);
void write_ranked_tsv(std::ostream& out, const RankedList& list);

}  // namespace hetesim
