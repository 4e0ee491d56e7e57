#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fewshot/detector_bank.hpp"
#include "fewshot/embedding.hpp"
#include "fewshot/kernel_svm.hpp"
#include "fewshot/pseudo_samples.hpp"

namespace fewshot {

struct AdaptationConfig {
  double lambda = kDefaultLambda;
  SolverConfig solver;
  KernelSpec kernel;
  std::optional<std::size_t> top_k;
  bool clamp_negative_sim = false;
  // With no real samples, replace C by 1e-4 / max||x~||^2 so that every
  // pseudo sample stays inside the margin and the trained detector is a
  // positive multiple of the zero-shot combination.
  bool zeroshot_exact = false;

  void validate() const;
  PseudoOptions pseudo_options() const;
};

// C that puts an all-pseudo training set in the small-C regime.
double zeroshot_exact_c(const PseudoSampleSet& pseudo);

/// Detector trained on real samples plus pseudo samples from the bank.
struct FewShotDetector {
  std::string target;
  DualModel model;
  std::size_t n_real = 0;
  std::size_t n_pseudo = 0;
  AdaptationConfig config;

  double score(std::span<const double> x) const { return fewshot::score(model, x); }
};

/// Trains on X united with the pseudo samples of `bank` for `target`.
/// An empty bank reduces to train_svm(X); an empty X trains on pseudo
/// samples alone.
///
/// Throws DataError when both inputs are empty, when the bank is empty and
/// X lacks a label, or when an embedding cannot be resolved.
FewShotDetector adapt(std::span<const LabeledSample> samples, const DetectorBank& bank,
                      std::string_view target, const EmbeddingStore& store,
                      const AdaptationConfig& config = {});

/// One-vs-rest detectors for a multi-class problem. For class c the
/// positives are its own features plus the positive pseudo samples for c;
/// the negatives are every other class's real features.
std::vector<FewShotDetector> adapt_multiclass(std::span<const std::vector<std::vector<double>>> class_features,
                                              const DetectorBank& bank,
                                              std::span<const std::string> class_tokens,
                                              const EmbeddingStore& store,
                                              const AdaptationConfig& config = {});

// argmax over per-class scores, ties to the lowest class index.
std::size_t predict_class(std::span<const FewShotDetector> detectors, std::span<const double> x);

/// Late fusion: weighted mean of the score lists, each first brought to
/// zero mean and unit (population) variance. A list with zero variance is
/// only mean-centered. Weights default to uniform.
std::vector<double> fuse_scores(std::span<const std::vector<double>> score_lists,
                                std::span<const double> weights = {}, bool normalize = true);

}  // namespace fewshot
