#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace fewshot::oracle {

QpSolution solve_qp_oracle(std::span<const LabeledSample> samples, double c_param, const KernelSpec& kernel) {
  const std::size_t n = samples.size();
  if (n == 0 || n > 10) throw std::invalid_argument("oracle handles 1..10 samples");

  Eigen::MatrixXd q(n, n);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y(i) = samples[i].label;
    for (std::size_t j = 0; j < n; ++j) {
      double k = 0.0;
      const auto& a = samples[i].features;
      const auto& b = samples[j].features;
      if (kernel.kind == KernelKind::linear) {
        for (std::size_t t = 0; t < a.size(); ++t) k += a[t] * b[t];
      } else {
        double d2 = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) d2 += (a[t] - b[t]) * (a[t] - b[t]);
        k = std::exp(-kernel.bandwidth * d2);
      }
      q(i, j) = samples[i].label * samples[j].label * k;
    }
  }

  const double eps = 1e-9 * std::max(1.0, c_param);
  QpSolution best;
  best.objective = -std::numeric_limits<double>::infinity();

  std::size_t patterns = 1;
  for (std::size_t i = 0; i < n; ++i) patterns *= 3;

  // state 0: alpha = 0, 1: alpha = C, 2: free
  std::vector<int> state(n);
  for (std::size_t p = 0; p < patterns; ++p) {
    std::size_t code = p;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(code % 3);
      code /= 3;
      if (state[i] == 2) free.push_back(i);
    }
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 1) alpha(i) = c_param;
    }

    double nu = 0.0;
    const std::size_t f = free.size();
    if (f > 0) {
      Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(f + 1, f + 1);
      Eigen::VectorXd rhs(f + 1);
      const Eigen::VectorXd q_alpha_bound = q * alpha;
      for (std::size_t a = 0; a < f; ++a) {
        for (std::size_t b = 0; b < f; ++b) sys(a, b) = q(free[a], free[b]);
        sys(a, f) = y(free[a]);
        sys(f, a) = y(free[a]);
        rhs(a) = 1.0 - q_alpha_bound(free[a]);
      }
      rhs(f) = -y.dot(alpha);
      const Eigen::VectorXd sol = sys.completeOrthogonalDecomposition().solve(rhs);
      if ((sys * sol - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm())) continue;
      bool inside = true;
      for (std::size_t a = 0; a < f; ++a) {
        if (sol(a) < -eps || sol(a) > c_param + eps) inside = false;
        alpha(free[a]) = std::clamp(sol(a), 0.0, c_param);
      }
      if (!inside) continue;
      nu = sol(f);
      if (std::abs(y.dot(alpha)) > eps) continue;
    } else if (std::abs(y.dot(alpha)) > eps) {
      continue;
    }

    // Stationarity: g_i = 1 - (Q alpha)_i - nu * y_i must be <= 0 at the
    // lower bound and >= 0 at the upper bound. With no free variable, nu is
    // any value in the interval the bounds allow.
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - q * alpha;
    bool kkt = true;
    if (f > 0) {
      for (std::size_t i = 0; i < n && kkt; ++i) {
        const double g = grad(i) - nu * y(i);
        if (state[i] == 0 && g > 1e-7) kkt = false;
        if (state[i] == 1 && g < -1e-7) kkt = false;
      }
    } else {
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        // grad_i - nu*y_i <= 0 (lower) or >= 0 (upper)
        const bool upper = state[i] == 1;
        if ((y(i) > 0) != upper) {
          lo = std::max(lo, grad(i) / y(i));
        } else {
          hi = std::min(hi, grad(i) / y(i));
        }
      }
      kkt = lo <= hi + 1e-7;
    }
    if (!kkt) continue;

    const double objective = alpha.sum() - 0.5 * alpha.dot(q * alpha);
    if (objective > best.objective) {
      best.objective = objective;
      best.alpha.assign(alpha.data(), alpha.data() + n);
    }
  }
  if (best.alpha.empty()) throw std::runtime_error("oracle found no KKT point");
  return best;
}

double brute_force_ap(std::span<const double> scores, std::span<const std::uint8_t> relevance) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (scores[j] > scores[i] || (scores[j] == scores[i] && j < i)) ++ahead;
    }
    rank[i] = ahead + 1;
  }
  double total = 0.0;
  std::size_t relevant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!relevance[i]) continue;
    ++relevant;
    std::size_t hits = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (relevance[j] && rank[j] <= rank[i]) ++hits;
    }
    total += static_cast<double>(hits) / static_cast<double>(rank[i]);
  }
  if (relevant == 0) return std::numeric_limits<double>::quiet_NaN();
  return total / static_cast<double>(relevant);
}

double brute_force_top_k(std::span<const std::vector<double>> matrix, std::span<const std::size_t> truth,
                         std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    std::vector<std::size_t> order(matrix[r].size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return matrix[r][a] > matrix[r][b]; });
    if (std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), truth[r]) !=
        order.begin() + static_cast<std::ptrdiff_t>(k)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(matrix.size());
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(ra.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double smallest_eigenvalue(std::span<const double> row_major, std::size_t n) {
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = row_major[i * n + j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t dim, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return v;
}

std::vector<LabeledSample> random_samples(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                          double separation) {
  std::vector<LabeledSample> out;
  const auto shift = random_vector(rng, dim, separation);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = (i == 0) ? 1 : (i == 1) ? -1 : (rng() % 2 ? 1 : -1);
    auto x = random_vector(rng, dim);
    for (std::size_t t = 0; t < dim; ++t) x[t] += label * shift[t];
    out.push_back({std::move(x), label});
  }
  return out;
}

EmbeddingStore random_store(std::mt19937_64& rng, std::size_t m, std::size_t embed_dim) {
  EmbeddingStore store(embed_dim);
  for (std::size_t j = 0; j < m; ++j) store.add("c" + std::to_string(j), random_vector(rng, embed_dim));
  store.add("target", random_vector(rng, embed_dim));
  return store;
}

DetectorBank random_bank(std::mt19937_64& rng, std::size_t m, std::size_t dim, bool normalize) {
  std::vector<LinearDetector> raw;
  for (std::size_t j = 0; j < m; ++j) {
    raw.push_back({"c" + std::to_string(j), random_vector(rng, dim), 1.0});
  }
  return DetectorBank::ingest(std::move(raw), normalize);
}

}  // namespace fewshot::oracle
