#include "fewshot/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "fewshot/numeric_text.hpp"

namespace fewshot {
namespace {

std::vector<std::size_t> descending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double average_precision(const RankedResult& result) {
  if (result.scores.size() != result.relevance.size()) {
    throw DataError("scores and relevance have different lengths");
  }
  for (auto r : result.relevance) {
    if (r > 1) throw DataError("relevance values must be 0 or 1");
  }
  const auto order = descending_order(result.scores);
  std::size_t hits = 0;
  double precision_sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (result.relevance[order[rank]] != 0) {
      ++hits;
      precision_sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) {
    throw UndefinedMetricError("undefined AP: no relevant items");
  }
  return precision_sum / static_cast<double>(hits);
}

double mean_ap(std::span<const double> aps) {
  if (aps.empty()) {
    throw DataError("mean AP of an empty list");
  }
  double sum = 0.0;
  for (double ap : aps) sum += ap;
  return sum / static_cast<double>(aps.size());
}

double top_k_accuracy(std::span<const std::vector<double>> score_matrix,
                      std::span<const std::size_t> true_class, std::size_t k) {
  if (score_matrix.size() != true_class.size()) {
    throw DataError("score matrix has " + std::to_string(score_matrix.size()) + " rows but " +
                    std::to_string(true_class.size()) + " labels");
  }
  if (k == 0) {
    throw std::invalid_argument("k must be at least 1");
  }
  if (score_matrix.empty()) {
    throw DataError("top-k accuracy of an empty score matrix");
  }
  std::size_t correct = 0;
  for (std::size_t r = 0; r < score_matrix.size(); ++r) {
    const auto& row = score_matrix[r];
    if (k > row.size()) {
      throw DataError("k = " + std::to_string(k) + " exceeds class count " + std::to_string(row.size()));
    }
    if (true_class[r] >= row.size()) {
      throw DataError("true class index " + std::to_string(true_class[r]) + " out of range");
    }
    // Rank of the true class: how many classes would be listed before it.
    const double target = row[true_class[r]];
    std::size_t ahead = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] > target || (row[c] == target && c < true_class[r])) ++ahead;
    }
    if (ahead < k) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(score_matrix.size());
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows) {
  out << "concept,N,method,AP\n";
  for (const auto& row : rows) {
    out << row.concept_name << ',' << row.n << ',' << row.method << ',' << format_real(row.ap) << '\n';
  }
}

}  // namespace fewshot
