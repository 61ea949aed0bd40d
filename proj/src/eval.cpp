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

#include "hetesim/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "hetesim/errors.hpp"
#include "hetesim/graph.hpp"

namespace hetesim {

RankedList RankedList::from_items(std::vector<RankedItem> items) {
  std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  RankedList list;
  list.items_ = std::move(items);
  list.rank_.reserve(list.items_.size());
  for (std::size_t i = 0; i < list.items_.size(); ++i) {
    auto [_, inserted] = list.rank_.emplace(list.items_[i].id, static_cast<Index>(i + 1));
    if (!inserted) raise(ErrorKind::InvalidArgument, "duplicate id in ranked list: " + list.items_[i].id);
  }
  return list;
}

Index RankedList::rank_of(const std::string& id) const {
  auto it = rank_.find(id);
  return it == rank_.end() ? 0 : it->second;
}

double auc(const RankedList& ranked, const LabelMap& labels, const std::string& positive) {
  std::vector<std::pair<double, bool>> scored;  // (score, is_positive)
  scored.reserve(ranked.size());
  for (const RankedItem& item : ranked.items()) {
    auto it = labels.find(item.id);
    if (it == labels.end()) raise(ErrorKind::MissingLabel, item.id);
    scored.emplace_back(item.score, it->second == positive);
  }
  std::size_t n_pos = 0;
  for (auto& [_, pos] : scored) n_pos += pos ? 1 : 0;
  std::size_t n_neg = scored.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    raise(ErrorKind::DegenerateLabels, "AUC needs both positive and negative items");

  // Mann-Whitney with mid-ranks for tied scores.
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (scored[k].second) pos_rank_sum += mid_rank;
    i = j;
  }
  double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

namespace {

double entropy(const std::unordered_map<std::string, std::size_t>& counts, double total) {
  double h = 0.0;
  for (auto& [_, c] : counts) {
    double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double nmi(const LabelMap& clustering, const LabelMap& truth) {
  if (clustering.size() != truth.size())
    raise(ErrorKind::IdSetMismatch, "labelings cover different id counts");
  for (auto& [id, _] : clustering)
    if (!truth.contains(id)) raise(ErrorKind::IdSetMismatch, id);

  double total = static_cast<double>(clustering.size());
  if (total == 0.0) raise(ErrorKind::IdSetMismatch, "empty labelings");

  std::unordered_map<std::string, std::size_t> cx, cy;
  std::unordered_map<std::string, std::size_t> joint;
  for (auto& [id, x] : clustering) {
    const std::string& y = truth.at(id);
    ++cx[x];
    ++cy[y];
    ++joint[x + "\x1f" + y];
  }
  double hx = entropy(cx, total), hy = entropy(cy, total);
  if (hx + hy == 0.0) return 1.0;  // both partitions trivial and identical

  double mi = 0.0;
  for (auto& [key, c] : joint) {
    auto sep = key.find('\x1f');
    double pxy = static_cast<double>(c) / total;
    double px = static_cast<double>(cx.at(key.substr(0, sep))) / total;
    double py = static_cast<double>(cy.at(key.substr(sep + 1))) / total;
    mi += pxy * std::log(pxy / (px * py));
  }
  double value = mi / (0.5 * (hx + hy));
  return std::clamp(value, 0.0, 1.0);
}

double recall_at_k(const RankedList& exact, const RankedList& approx, Index k) {
  if (k < 1) raise(ErrorKind::InvalidArgument, "k must be >= 1");
  std::size_t ke = std::min<std::size_t>(k, exact.size());
  std::size_t ka = std::min<std::size_t>(k, approx.size());
  if (ke == 0) return 1.0;  // nothing to recall
  std::unordered_set<std::string> top_exact;
  for (std::size_t i = 0; i < ke; ++i) top_exact.insert(exact.items()[i].id);
  std::size_t found = 0;
  for (std::size_t i = 0; i < ka; ++i) found += top_exact.contains(approx.items()[i].id) ? 1 : 0;
  return static_cast<double>(found) / static_cast<double>(ke);
}

double avg_rank_difference(const RankedList& measure, const RankedList& truth, Index top_n) {
  if (top_n < 1) raise(ErrorKind::InvalidArgument, "top_n must be >= 1");
  if (static_cast<Index>(truth.size()) < top_n)
    raise(ErrorKind::InvalidArgument, "ground truth covers fewer than top_n items");
  double sum = 0.0;
  Index absent_rank = static_cast<Index>(measure.size()) + 1;
  for (Index i = 0; i < top_n; ++i) {
    Index truth_rank = i + 1;
    Index measured = measure.rank_of(truth.items()[i].id);
    if (measured == 0) measured = absent_rank;
    sum += std::abs(static_cast<double>(measured - truth_rank));
  }
  return sum / static_cast<double>(top_n);
}

RankedList ranked_from_row(const SparseMatrix& scores, Index row,
                           const std::vector<std::string>& col_ids) {
  std::vector<RankedItem> items;
  auto cols = scores.row_cols(row);
  auto vals = scores.row_vals(row);
  items.reserve(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) items.push_back({col_ids[cols[k]], vals[k]});
  return RankedList::from_items(std::move(items));
}

double matrix_recall_at_k(const SparseMatrix& exact, const SparseMatrix& approx, Index k,
                          const std::vector<std::string>& col_ids) {
  if (!exact.same_shape(approx)) raise(ErrorKind::DimensionMismatch, "score shapes differ");
  double sum = 0.0;
  Index counted = 0;
  for (Index r = 0; r < exact.rows(); ++r) {
    if (exact.row_nnz(r) == 0) continue;
    sum += recall_at_k(ranked_from_row(exact, r, col_ids), ranked_from_row(approx, r, col_ids), k);
    ++counted;
  }
  return counted == 0 ? 1.0 : sum / static_cast<double>(counted);
}

namespace {

std::vector<std::pair<std::string, std::string>> read_two_column_tsv(std::istream& in,
                                                                     const char* what) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      raise(ErrorKind::ParseError,
            "line " + std::to_string(line_no) + ": expected " + std::string(what));
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

}  // namespace

RankedList read_ranked_tsv(std::istream& in) {
  std::vector<RankedItem> items;
  for (auto& [id, text] : read_two_column_tsv(in, "id<TAB>score")) {
    double score = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), score);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      raise(ErrorKind::ParseError, "bad score '" + text + "' for id " + id);
    items.push_back({std::move(id), score});
  }
  return RankedList::from_items(std::move(items));
}

LabelMap read_labels_tsv(std::istream& in) {
  LabelMap labels;
  for (auto& [id, label] : read_two_column_tsv(in, "id<TAB>label")) {
    auto [_, inserted] = labels.emplace(id, label);
    if (!inserted) raise(ErrorKind::ParseError, "duplicate label for id " + id);
  }
  return labels;
}

void write_ranked_tsv(std::ostream& out, const RankedList& list) {
  for (const RankedItem& item : list.items())
    out << item.id << "\t" << format_value_12sig(item.score) << "\n";
}

}  // namespace hetesim
