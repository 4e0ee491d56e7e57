#include "fewshot/kernel_svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fewshot/error.hpp"
#include "fewshot/numeric_text.hpp"

namespace fewshot {
namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kFullGramLimit = 3000;

// Signed kernel rows Q_ij = y_i y_j k(x_i, x_j), either precomputed or
// evaluated per request for large problems.
class QMatrix {
 public:
  QMatrix(std::span<const LabeledSample* const> samples, const KernelSpec& kernel)
      : samples_(samples), kernel_(kernel), n_(samples.size()), diag_(n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      diag_[i] = kernel_eval(kernel_, samples_[i]->features, samples_[i]->features);
    }
    if (n_ <= kFullGramLimit) {
      full_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i; j < n_; ++j) {
          const double q = signed_kernel(i, j);
          full_[i * n_ + j] = q;
          full_[j * n_ + i] = q;
        }
      }
    } else {
      scratch_a_.resize(n_);
      scratch_b_.resize(n_);
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  // `slot` selects one of two scratch buffers so two rows can be held at once.
  std::span<const double> row(std::size_t i, int slot) {
    if (!full_.empty()) {
      return std::span<const double>(full_.data() + i * n_, n_);
    }
    auto& buf = slot == 0 ? scratch_a_ : scratch_b_;
    for (std::size_t j = 0; j < n_; ++j) buf[j] = signed_kernel(i, j);
    return buf;
  }

 private:
  double signed_kernel(std::size_t i, std::size_t j) const {
    const double k = kernel_eval(kernel_, samples_[i]->features, samples_[j]->features);
    return samples_[i]->label == samples_[j]->label ? k : -k;
  }

  std::span<const LabeledSample* const> samples_;
  KernelSpec kernel_;
  std::size_t n_;
  std::vector<double> diag_;
  std::vector<double> full_;
  std::vector<double> scratch_a_;
  std::vector<double> scratch_b_;
};

}  // namespace

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::linear ? "linear" : "gaussian";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "gaussian" || name == "rbf") return KernelKind::gaussian;
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  if (kind == KernelKind::gaussian && (!(bandwidth > 0.0) || !std::isfinite(bandwidth))) {
    throw std::invalid_argument("gaussian bandwidth must be finite and positive");
  }
}

void SolverConfig::validate() const {
  if (!(c_param > 0.0) || !std::isfinite(c_param)) {
    throw std::invalid_argument("C must be finite and positive");
  }
  if (!(kkt_tolerance > 0.0) || !std::isfinite(kkt_tolerance)) {
    throw std::invalid_argument("KKT tolerance must be finite and positive");
  }
  if (max_passes == 0) {
    throw std::invalid_argument("max_passes must be positive");
  }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) {
    throw DataError("kernel arguments have dimensions " + std::to_string(x.size()) + " and " +
                    std::to_string(z.size()));
  }
  if (spec.kind == KernelKind::linear) {
    return dot(x, z);
  }
  double dist2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - z[i];
    dist2 += diff * diff;
  }
  return std::exp(-spec.bandwidth * dist2);
}

std::vector<double> gram_matrix(const KernelSpec& spec, std::span<const std::vector<double>> points) {
  const std::size_t n = points.size();
  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      gram[i * n + j] = gram[j * n + i] = kernel_eval(spec, points[i], points[j]);
    }
  }
  return gram;
}

DualModel train_svm(std::span<const LabeledSample> samples, const SolverConfig& config,
                    const KernelSpec& kernel) {
  config.validate();
  kernel.validate();
  if (samples.empty()) {
    throw DataError("cannot train on an empty sample set");
  }
  const std::size_t dim = samples.front().features.size();
  validate_samples(samples, dim);
  const bool has_pos = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.label > 0; });
  const bool has_neg = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.label < 0; });
  if (!has_pos || !has_neg) {
    throw DataError("training needs at least one sample of each label");
  }

  const std::size_t n = samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.sample_order_seed != 0) {
    std::mt19937_64 rng(config.sample_order_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<const LabeledSample*> work(n);
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) {
    work[t] = &samples[order[t]];
    y[t] = static_cast<double>(work[t]->label);
  }

  const double c = config.c_param;
  QMatrix q(work, kernel);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - sum(a)

  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
  };

  const std::size_t max_iterations =
      config.max_passes > std::numeric_limits<std::size_t>::max() / n ? std::numeric_limits<std::size_t>::max()
                                                                      : config.max_passes * n;
  std::size_t iteration = 0;
  for (;;) {
    // i: maximal violator in I_up. j: among I_low members that violate
    // against i, the one with the largest second-order objective gain.
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low(t) && v < m_low) {
        m_low = v;
      }
    }
    const double gap = m_up - m_low;
    if (i == n || gap <= config.kkt_tolerance) {
      break;
    }
    if (iteration >= max_iterations) {
      throw ConvergenceError("solver did not converge within " + std::to_string(max_iterations) +
                                 " iterations (KKT violation " + format_real(gap) + ")",
                             gap);
    }

    const auto qi = q.row(i, 0);
    std::size_t j = n;
    {
      double best_gain = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < n; ++t) {
        if (!in_low(t)) continue;
        const double b = m_up + y[t] * grad[t];
        if (b <= 0.0) continue;
        // Curvature along the (i, t) direction: K_ii + K_tt - 2 K_it.
        double a = q.diag(i) + q.diag(t) - 2.0 * y[i] * y[t] * qi[t];
        if (a <= 0.0) a = kTau;
        const double gain = -(b * b) / a;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (j == n) {
      break;
    }
    ++iteration;

    const auto qj = q.row(j, 1);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = q.diag(i) + q.diag(j) + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = q.diag(i) + q.diag(j) - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += qi[t] * dai + qj[t] * daj;
    }
  }

  // Bias from free vectors when there are any, else the midpoint of the
  // feasible interval implied by the bounded ones.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (upper + lower) / 2.0;

  std::vector<double> alpha_by_input(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) alpha_by_input[order[t]] = alpha[t];

  DualModel model;
  model.bias = -rho;
  model.kernel = kernel;
  model.c_param = c;
  model.dim = dim;
  model.iterations = iteration;
  for (std::size_t s = 0; s < n; ++s) {
    const double coeff = samples[s].label * alpha_by_input[s];
    if (std::abs(coeff) < kSupportPruneThreshold) continue;
    model.support.push_back(samples[s]);
    model.dual_coeffs.push_back(coeff);
  }
  return model;
}

double score(const DualModel& model, std::span<const double> x) {
  if (x.size() != model.dim) {
    throw DataError("feature dimension " + std::to_string(x.size()) +
                    " does not match model dimension " + std::to_string(model.dim));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < model.support.size(); ++i) {
    total += model.dual_coeffs[i] * kernel_eval(model.kernel, model.support[i].features, x);
  }
  return total + model.bias;
}

std::vector<double> score_all(const DualModel& model, std::span<const std::vector<double>> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(score(model, x));
  return out;
}

std::vector<double> primal_weights(const DualModel& model) {
  if (model.kernel.kind != KernelKind::linear) {
    throw std::invalid_argument("primal weights exist only for the linear kernel");
  }
  std::vector<double> w(model.dim, 0.0);
  for (std::size_t i = 0; i < model.support.size(); ++i) {
    const auto& s = model.support[i].features;
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += model.dual_coeffs[i] * s[k];
  }
  return w;
}

double dual_objective(const DualModel& model) {
  const std::size_t n = model.support.size();
  double linear = 0.0;
  double quadratic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += std::abs(model.dual_coeffs[i]);
    for (std::size_t j = 0; j < n; ++j) {
      quadratic += model.dual_coeffs[i] * model.dual_coeffs[j] *
                   kernel_eval(model.kernel, model.support[i].features, model.support[j].features);
    }
  }
  return linear - 0.5 * quadratic;
}

}  // namespace fewshot
