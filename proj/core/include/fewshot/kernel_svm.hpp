#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fewshot/sample_io.hpp"

namespace fewshot {

enum class KernelKind { linear, gaussian };

std::string_view to_string(KernelKind kind);
// Accepts "linear", "gaussian" or "rbf". Throws std::invalid_argument.
KernelKind parse_kernel_kind(std::string_view name);

// Gaussian: k(x, z) = exp(-bandwidth * ||x - z||^2).
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double bandwidth = 1.0;

  static KernelSpec linear() { return {}; }
  static KernelSpec gaussian(double bandwidth) { return {KernelKind::gaussian, bandwidth}; }

  void validate() const;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z);

// Row-major n x n matrix of kernel values.
std::vector<double> gram_matrix(const KernelSpec& spec, std::span<const std::vector<double>> points);

struct SolverConfig {
  double c_param = 1.0;
  double kkt_tolerance = 1e-6;
  // The iteration budget is max_passes * n pair updates.
  std::size_t max_passes = 10000;
  // 0 keeps input order; any other value applies a seeded permutation
  // before solving, which changes how ties in pair selection resolve.
  std::uint64_t sample_order_seed = 0;

  void validate() const;
};

inline constexpr double kSupportPruneThreshold = 1e-10;

/// A trained soft-margin classifier in dual form:
///   f(x) = sum_i dual_coeffs[i] * k(support[i].features, x) + bias
/// with dual_coeffs[i] = label_i * alpha_i, 0 < alpha_i <= c_param.
struct DualModel {
  std::vector<LabeledSample> support;
  std::vector<double> dual_coeffs;
  double bias = 0.0;
  KernelSpec kernel;
  double c_param = 1.0;
  std::size_t dim = 0;
  std::size_t iterations = 0;  // SMO pair updates used; not serialized
};

/// Sequential minimal optimization on the dual of the L2-regularized hinge
/// loss with an unregularized bias. The first index of each pair is the
/// maximal KKT violator, the second maximizes the second-order gain; ties
/// go to the lowest index, so results are deterministic.
///
/// Throws DataError for single-class or non-finite input and
/// ConvergenceError when the iteration budget runs out.
DualModel train_svm(std::span<const LabeledSample> samples, const SolverConfig& config = {},
                    const KernelSpec& kernel = {});

double score(const DualModel& model, std::span<const double> x);
std::vector<double> score_all(const DualModel& model, std::span<const std::vector<double>> xs);

// sum_i dual_coeffs[i] * support[i]. Linear kernel only.
std::vector<double> primal_weights(const DualModel& model);

// sum_i alpha_i - 1/2 sum_ij c_i c_j k(s_i, s_j)
double dual_objective(const DualModel& model);

}  // namespace fewshot
