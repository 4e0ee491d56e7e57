#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fewshot/embedding.hpp"

namespace fewshot {

// A pre-trained linear detector g(x) = w.x for one base concept.
struct LinearDetector {
  std::string concept_name;
  std::vector<double> weights;
  double original_norm = 1.0;  // ||w|| before ingestion normalization

  double score(std::span<const double> x) const;
};

// Final classification layer of a network: one row a_j and bias b_j per
// output concept.
struct SoftmaxLayer {
  std::vector<std::vector<double>> rows;
  std::vector<double> biases;
};

/// The set of pre-trained detectors available for zero-shot composition.
///
/// All detectors share one dimension and concept names are unique. When
/// built with normalization (the default), every weight vector has unit
/// L2 norm and original_norm keeps the ingested magnitude.
class DetectorBank {
 public:
  DetectorBank() = default;

  /// Ingests raw (concept, weights) pairs. Throws DataError on mixed
  /// dimensions, duplicate concepts, non-finite or all-zero weights.
  static DetectorBank ingest(std::vector<LinearDetector> raw, bool normalize = true);

  /// Restores a bank whose detectors are already in their final form
  /// (as written by write_bank). Validates invariants but never rescales.
  static DetectorBank restore(std::size_t dim, std::vector<LinearDetector> detectors,
                              bool normalized);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return detectors_.size(); }
  bool empty() const noexcept { return detectors_.empty(); }
  bool normalized() const noexcept { return normalized_; }
  std::span<const LinearDetector> detectors() const noexcept { return detectors_; }
  const LinearDetector& operator[](std::size_t j) const { return detectors_.at(j); }
  std::vector<std::string> concepts() const;

 private:
  std::size_t dim_ = 0;
  std::vector<LinearDetector> detectors_;
  bool normalized_ = false;
};

// w_j = (a_j; b_j), so that w_j . lift_feature(h) = a_j . h + b_j.
// The exp/normalization of the softmax itself is not represented.
DetectorBank from_softmax_layer(const SoftmaxLayer& layer, std::span<const std::string> concepts,
                                bool normalize = true);

// (h; 1)
std::vector<double> lift_feature(std::span<const double> h);

struct ZeroShotDetector {
  std::string target;
  std::vector<double> betas;  // one per bank detector
  double bias = 0.0;
  DetectorBank bank;
};

// sum_j betas[j] * (w_j . x) + bias
double zero_shot_score(std::span<const double> x, const ZeroShotDetector& detector);

// betas[j] = sim(d_j, target). With top_k, all but the top_k largest betas
// (ties to the lower bank index) are zeroed.
ZeroShotDetector compose_zero_shot(std::string_view target, const DetectorBank& bank,
                                   const EmbeddingStore& store,
                                   std::optional<std::size_t> top_k = std::nullopt,
                                   double bias = 0.0);

// Indices of the top_k largest values, ties to the lower index, returned in
// ascending index order.
std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t top_k);

// JSON: {"dim", "normalized", "detectors": [{"concept", "weights", "original_norm"}]}
DetectorBank read_bank(std::istream& in);
DetectorBank load_bank(const std::filesystem::path& path);
void write_bank(std::ostream& out, const DetectorBank& bank);
void save_bank(const std::filesystem::path& path, const DetectorBank& bank);

}  // namespace fewshot
