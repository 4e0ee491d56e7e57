#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fewshot/adaptation.hpp"
#include "fewshot/detector_bank.hpp"
#include "fewshot/embedding.hpp"
#include "fewshot/kernel_svm.hpp"

namespace fewshot {

/// Configuration of a synthetic world in which word-vector similarity
/// predicts feature-space geometry.
///
/// Every concept gets a unit prototype z in a shared latent space of
/// dimension min(feature_dim, embed_dim). Feature prototypes are Q z and
/// embeddings are coupling * R z + (1 - coupling) * noise, for random
/// orthonormal Q and R. Samples are feature prototype plus isotropic
/// Gaussian noise of standard deviation noise_sigma.
struct SyntheticWorldSpec {
  std::size_t feature_dim = 32;
  std::size_t embed_dim = 16;
  std::size_t n_base = 20;
  std::size_t n_novel = 5;
  std::size_t train_per_base = 50;
  std::size_t pool_per_novel = 200;
  double noise_sigma = 0.6;
  double coupling = 0.95;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument for zero dims, zero classes, or
  // parameters out of range.
  void validate() const;
  // Pseudo sets are only guaranteed separable when feature_dim > n_base.
  bool pseudo_separable() const noexcept { return feature_dim > n_base; }
};

struct NovelConcept {
  std::string token;
  std::vector<double> prototype;
  std::vector<std::vector<double>> train_positives;  // pool_per_novel samples
};

struct SyntheticWorld {
  SyntheticWorldSpec spec;
  EmbeddingStore store{1};
  DetectorBank bank;
  std::vector<std::string> base_tokens;
  std::vector<std::vector<double>> base_prototypes;
  std::vector<NovelConcept> novel;
  // Background samples drawn from base concepts, used as training negatives.
  std::vector<std::vector<double>> train_negatives;
  // Held-out evaluation set; test_class holds a novel index, or -1 for
  // background drawn from the base concepts.
  std::vector<std::vector<double>> test_features;
  std::vector<int> test_class;

  std::vector<std::uint8_t> relevance(std::size_t novel_index) const;
};

// Bank detectors are trained one-vs-rest on the base samples with
// `bank_solver` and a linear kernel. Fully determined by spec.seed.
SyntheticWorld generate_world(const SyntheticWorldSpec& spec, const SolverConfig& bank_solver = {});

inline constexpr std::string_view kMethodSupervised = "supervised_only";
inline constexpr std::string_view kMethodZeroShot = "zero_shot_only";
inline constexpr std::string_view kMethodFewShot = "few_shot";

struct SweepRow {
  std::string method;
  std::size_t n = 0;
  std::size_t replicate = 0;
  double mean_ap = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;

  // Average of mean_ap over replicates for one (method, N) cell. Throws
  // std::out_of_range if the cell is absent.
  double cell_mean(std::string_view method, std::size_t n) const;
  std::size_t cell_count(std::string_view method, std::size_t n) const;
};

/// For every replicate and N: draws N positives and N background negatives
/// per novel concept, trains the supervised-only and few-shot detectors,
/// scores the held-out set with them and with the zero-shot composition,
/// and records mean AP over novel concepts. N = 0 has no supervised row.
///
/// Per-replicate randomness derives from (spec.seed, replicate) only.
SweepReport run_sweep(const SyntheticWorld& world, std::span<const std::size_t> n_values,
                      std::size_t replicates, const AdaptationConfig& config = {});
SweepReport run_sweep(const SyntheticWorldSpec& spec, std::span<const std::size_t> n_values,
                      std::size_t replicates, const AdaptationConfig& config = {});

// "method,N,replicate,mean_ap"
void write_sweep_csv(std::ostream& out, const SweepReport& report);

}  // namespace fewshot
