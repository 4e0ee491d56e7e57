#include "fewshot/pseudo_samples.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fewshot {

PseudoSampleSet generate_pseudo(const DetectorBank& bank, std::string_view target,
                                const EmbeddingStore& store, const PseudoOptions& options) {
  if (!(options.lambda > 0.0) || !std::isfinite(options.lambda)) {
    throw std::invalid_argument("lambda must be finite and positive");
  }
  PseudoSampleSet set;
  set.lambda = options.lambda;
  if (bank.empty()) {
    return set;
  }

  // Select on the unmasked similarities; the top_k-masked betas would rank
  // zeroed entries above retained negative ones.
  const ZeroShotDetector zs = compose_zero_shot(target, bank, store);
  std::vector<bool> retained(bank.size(), true);
  if (options.top_k) {
    std::fill(retained.begin(), retained.end(), false);
    for (std::size_t j : top_k_indices(zs.betas, *options.top_k)) retained[j] = true;
  }

  for (std::size_t j = 0; j < bank.size(); ++j) {
    if (!retained[j]) continue;
    double sim = zs.betas[j];
    if (options.clamp_negative_sim && sim < 0.0) sim = 0.0;
    const double scale = options.lambda * sim;
    if (std::abs(scale) < kPseudoDropThreshold) continue;

    const auto& w = bank[j].weights;
    LabeledSample negative{std::vector<double>(w.size()), -1};
    LabeledSample positive{std::vector<double>(w.size()), +1};
    for (std::size_t k = 0; k < w.size(); ++k) {
      positive.features[k] = scale * w[k];
      negative.features[k] = -positive.features[k];
    }
    set.samples.push_back(std::move(negative));
    set.samples.push_back(std::move(positive));
    set.source_index.push_back(j);
    set.source_index.push_back(j);
  }
  return set;
}

PseudoSampleSet generate_pseudo(const DetectorBank& bank, std::string_view target,
                                const EmbeddingStore& store, double lambda) {
  PseudoOptions options;
  options.lambda = lambda;
  return generate_pseudo(bank, target, store, options);
}

std::vector<LabeledSample> positive_only(const PseudoSampleSet& set) {
  std::vector<LabeledSample> out;
  out.reserve(set.samples.size() / 2);
  for (const auto& s : set.samples) {
    if (s.label > 0) out.push_back(s);
  }
  return out;
}

}  // namespace fewshot
