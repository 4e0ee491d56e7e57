#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fewshot/error.hpp"

namespace fewshot {

// Average precision over a list with no relevant item.
class UndefinedMetricError : public DataError {
 public:
  using DataError::DataError;
};

struct RankedResult {
  std::vector<double> scores;
  std::vector<std::uint8_t> relevance;  // 0 or 1, parallel to scores
};

// Items are ranked by descending score, ties by ascending original index.
// AP = (1/R) * sum over relevant ranks k of precision@k.
double average_precision(const RankedResult& result);

double mean_ap(std::span<const double> aps);

// Fraction of rows whose true class is among the k highest scores (ties to
// the lower class index).
double top_k_accuracy(std::span<const std::vector<double>> score_matrix,
                      std::span<const std::size_t> true_class, std::size_t k);

struct ReportRow {
  std::string concept_name;
  std::size_t n = 0;
  std::string method;
  double ap = 0.0;
};

// CSV with header "concept,N,method,AP".
void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace fewshot
