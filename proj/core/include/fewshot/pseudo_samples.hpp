#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "fewshot/detector_bank.hpp"
#include "fewshot/embedding.hpp"
#include "fewshot/sample_io.hpp"

namespace fewshot {

inline constexpr double kDefaultLambda = 0.5;

// Detectors whose |lambda * sim| falls below this are not turned into
// samples: a zero vector carrying both labels cannot be separated.
inline constexpr double kPseudoDropThreshold = 1e-12;

struct PseudoOptions {
  double lambda = kDefaultLambda;
  bool clamp_negative_sim = false;
  std::optional<std::size_t> top_k;  // keep only the top_k most similar detectors
};

/// Mirrored surrogate samples generated from a detector bank.
///
/// For each retained detector j the set holds, in this order,
///   (-lambda * sim_j * w_j, -1) then (+lambda * sim_j * w_j, +1)
/// and source_index records j for both.
struct PseudoSampleSet {
  std::vector<LabeledSample> samples;
  std::vector<std::size_t> source_index;
  double lambda = kDefaultLambda;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
};

PseudoSampleSet generate_pseudo(const DetectorBank& bank, std::string_view target,
                                const EmbeddingStore& store, const PseudoOptions& options);

PseudoSampleSet generate_pseudo(const DetectorBank& bank, std::string_view target,
                                const EmbeddingStore& store, double lambda = kDefaultLambda);

// The +1 half of the set, order preserved.
std::vector<LabeledSample> positive_only(const PseudoSampleSet& set);

}  // namespace fewshot
