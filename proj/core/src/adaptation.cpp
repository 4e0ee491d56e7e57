#include "fewshot/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fewshot/error.hpp"
#include "fewshot/numeric_text.hpp"

namespace fewshot {

void AdaptationConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and positive");
  }
  if (top_k && *top_k == 0) {
    throw std::invalid_argument("top_k must be positive");
  }
  solver.validate();
  kernel.validate();
}

PseudoOptions AdaptationConfig::pseudo_options() const {
  PseudoOptions options;
  options.lambda = lambda;
  options.clamp_negative_sim = clamp_negative_sim;
  options.top_k = top_k;
  return options;
}

double zeroshot_exact_c(const PseudoSampleSet& pseudo) {
  double max_norm2 = 0.0;
  for (const auto& s : pseudo.samples) max_norm2 = std::max(max_norm2, squared_norm(s.features));
  if (max_norm2 == 0.0) {
    throw DataError("no pseudo samples to derive the zero-shot C from");
  }
  return 1e-4 / max_norm2;
}

FewShotDetector adapt(std::span<const LabeledSample> samples, const DetectorBank& bank,
                      std::string_view target, const EmbeddingStore& store,
                      const AdaptationConfig& config) {
  config.validate();
  if (samples.empty() && bank.empty()) {
    throw DataError("adaptation needs training samples or a detector bank");
  }
  if (!samples.empty() && !bank.empty() && samples.front().features.size() != bank.dim()) {
    throw DataError("sample dimension " + std::to_string(samples.front().features.size()) +
                    " does not match bank dimension " + std::to_string(bank.dim()));
  }

  const PseudoSampleSet pseudo = generate_pseudo(bank, target, store, config.pseudo_options());

  SolverConfig solver = config.solver;
  if (config.zeroshot_exact && samples.empty()) {
    solver.c_param = zeroshot_exact_c(pseudo);
  }

  FewShotDetector detector;
  detector.target = normalize_token(target);
  detector.n_real = samples.size();
  detector.n_pseudo = pseudo.size();
  detector.config = config;
  if (pseudo.empty()) {
    detector.model = train_svm(samples, solver, config.kernel);
  } else {
    std::vector<LabeledSample> united(samples.begin(), samples.end());
    united.insert(united.end(), pseudo.samples.begin(), pseudo.samples.end());
    detector.model = train_svm(united, solver, config.kernel);
  }
  return detector;
}

std::vector<FewShotDetector> adapt_multiclass(std::span<const std::vector<std::vector<double>>> class_features,
                                              const DetectorBank& bank,
                                              std::span<const std::string> class_tokens,
                                              const EmbeddingStore& store,
                                              const AdaptationConfig& config) {
  config.validate();
  if (class_features.size() < 2) {
    throw DataError("multi-class adaptation needs at least 2 classes");
  }
  if (class_tokens.size() != class_features.size()) {
    throw DataError("got " + std::to_string(class_tokens.size()) + " class names for " +
                    std::to_string(class_features.size()) + " classes");
  }

  std::vector<FewShotDetector> detectors;
  detectors.reserve(class_features.size());
  for (std::size_t c = 0; c < class_features.size(); ++c) {
    if (class_features[c].empty() && bank.empty()) {
      throw DataError("class '" + class_tokens[c] + "' has no samples and the bank is empty");
    }
    const PseudoSampleSet pseudo = generate_pseudo(bank, class_tokens[c], store, config.pseudo_options());
    const auto pseudo_pos = positive_only(pseudo);

    std::vector<LabeledSample> united;
    for (const auto& x : class_features[c]) united.push_back({x, +1});
    for (std::size_t other = 0; other < class_features.size(); ++other) {
      if (other == c) continue;
      for (const auto& x : class_features[other]) united.push_back({x, -1});
    }
    const std::size_t n_real = united.size();
    united.insert(united.end(), pseudo_pos.begin(), pseudo_pos.end());
    if (std::none_of(united.begin(), united.end(), [](const auto& s) { return s.label > 0; })) {
      throw DataError("class '" + class_tokens[c] + "' has no positive samples");
    }

    FewShotDetector det;
    det.target = normalize_token(class_tokens[c]);
    det.n_real = n_real;
    det.n_pseudo = pseudo_pos.size();
    det.config = config;
    det.model = train_svm(united, config.solver, config.kernel);
    detectors.push_back(std::move(det));
  }
  return detectors;
}

std::size_t predict_class(std::span<const FewShotDetector> detectors, std::span<const double> x) {
  if (detectors.empty()) {
    throw std::invalid_argument("no class detectors");
  }
  std::size_t best = 0;
  double best_score = detectors[0].score(x);
  for (std::size_t c = 1; c < detectors.size(); ++c) {
    const double s = detectors[c].score(x);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

std::vector<double> fuse_scores(std::span<const std::vector<double>> score_lists,
                                std::span<const double> weights, bool normalize) {
  if (score_lists.empty()) {
    throw DataError("nothing to fuse");
  }
  const std::size_t n = score_lists.front().size();
  for (const auto& list : score_lists) {
    if (list.size() != n) {
      throw DataError("score lists have different lengths");
    }
  }
  if (!weights.empty() && weights.size() != score_lists.size()) {
    throw DataError("got " + std::to_string(weights.size()) + " fusion weights for " +
                    std::to_string(score_lists.size()) + " score lists");
  }
  double weight_total = 0.0;
  for (std::size_t l = 0; l < score_lists.size(); ++l) {
    const double w = weights.empty() ? 1.0 : weights[l];
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("fusion weights must be finite and non-negative");
    }
    weight_total += w;
  }
  if (!(weight_total > 0.0)) {
    throw std::invalid_argument("fusion weights sum to zero");
  }

  std::vector<double> fused(n, 0.0);
  for (std::size_t l = 0; l < score_lists.size(); ++l) {
    const auto& list = score_lists[l];
    const double w = weights.empty() ? 1.0 : weights[l];
    double shift = 0.0;
    double scale = 1.0;
    if (normalize && n > 0) {
      double mean = 0.0;
      for (double s : list) mean += s;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double s : list) var += (s - mean) * (s - mean);
      var /= static_cast<double>(n);
      shift = mean;
      if (var > 0.0) scale = 1.0 / std::sqrt(var);
    }
    for (std::size_t i = 0; i < n; ++i) fused[i] += w * (list[i] - shift) * scale;
  }
  for (double& v : fused) v /= weight_total;
  return fused;
}

}  // namespace fewshot
