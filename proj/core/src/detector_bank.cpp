#include "fewshot/detector_bank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/numeric_text.hpp"

namespace fewshot {
namespace {

void check_detectors(std::size_t dim, std::span<const LinearDetector> detectors) {
  std::unordered_set<std::string> seen;
  for (const auto& det : detectors) {
    if (det.weights.size() != dim) {
      throw DataError("detector '" + det.concept_name + "' has dimension " +
                      std::to_string(det.weights.size()) + ", bank dimension is " +
                      std::to_string(dim));
    }
    if (!std::all_of(det.weights.begin(), det.weights.end(),
                     [](double v) { return std::isfinite(v); })) {
      throw DataError("non-finite weight in detector '" + det.concept_name + "'");
    }
    if (!(det.original_norm > 0.0) || !std::isfinite(det.original_norm)) {
      throw DataError("detector '" + det.concept_name + "' has non-positive original_norm");
    }
    if (!seen.insert(det.concept_name).second) {
      throw DataError("duplicate concept '" + det.concept_name + "' in detector bank");
    }
  }
}

}  // namespace

double LinearDetector::score(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw DataError("feature dimension " + std::to_string(x.size()) +
                    " does not match detector dimension " + std::to_string(weights.size()));
  }
  return dot(weights, x);
}

DetectorBank DetectorBank::ingest(std::vector<LinearDetector> raw, bool normalize) {
  DetectorBank bank;
  bank.normalized_ = normalize;
  if (raw.empty()) {
    return bank;
  }
  bank.dim_ = raw.front().weights.size();
  if (bank.dim_ == 0) {
    throw DataError("detector dimension must be positive");
  }
  for (auto& det : raw) {
    det.concept_name = normalize_token(det.concept_name);
    const double norm = std::sqrt(squared_norm(det.weights));
    if (norm == 0.0) {
      throw DataError("detector '" + det.concept_name + "' has all-zero weights");
    }
    det.original_norm = norm;
    if (normalize) {
      for (double& w : det.weights) w /= norm;
    }
  }
  check_detectors(bank.dim_, raw);
  bank.detectors_ = std::move(raw);
  return bank;
}

DetectorBank DetectorBank::restore(std::size_t dim, std::vector<LinearDetector> detectors,
                                   bool normalized) {
  if (!detectors.empty() && dim == 0) {
    throw DataError("detector dimension must be positive");
  }
  check_detectors(dim, detectors);
  if (normalized) {
    for (const auto& det : detectors) {
      if (std::abs(std::sqrt(squared_norm(det.weights)) - 1.0) > 1e-9) {
        throw DataError("bank is flagged normalized but detector '" + det.concept_name +
                        "' is not unit norm");
      }
    }
  }
  DetectorBank bank;
  bank.dim_ = dim;
  bank.detectors_ = std::move(detectors);
  bank.normalized_ = normalized;
  return bank;
}

std::vector<std::string> DetectorBank::concepts() const {
  std::vector<std::string> names;
  names.reserve(detectors_.size());
  for (const auto& det : detectors_) names.push_back(det.concept_name);
  return names;
}

DetectorBank from_softmax_layer(const SoftmaxLayer& layer, std::span<const std::string> concepts,
                                bool normalize) {
  if (layer.rows.size() != layer.biases.size()) {
    throw DataError("softmax layer has " + std::to_string(layer.rows.size()) + " rows but " +
                    std::to_string(layer.biases.size()) + " biases");
  }
  if (concepts.size() != layer.rows.size()) {
    throw DataError("softmax layer has " + std::to_string(layer.rows.size()) + " rows but " +
                    std::to_string(concepts.size()) + " concept names");
  }
  std::vector<LinearDetector> raw;
  raw.reserve(layer.rows.size());
  for (std::size_t j = 0; j < layer.rows.size(); ++j) {
    const auto& row = layer.rows[j];
    if (row.empty()) {
      throw DataError("softmax layer input dimension must be at least 1");
    }
    std::vector<double> w(row.begin(), row.end());
    w.push_back(layer.biases[j]);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
      throw DataError("softmax row " + std::to_string(j) + " is all zero");
    }
    raw.push_back({concepts[j], std::move(w), 1.0});
  }
  return DetectorBank::ingest(std::move(raw), normalize);
}

std::vector<double> lift_feature(std::span<const double> h) {
  std::vector<double> x(h.begin(), h.end());
  x.push_back(1.0);
  return x;
}

double zero_shot_score(std::span<const double> x, const ZeroShotDetector& detector) {
  const auto detectors = detector.bank.detectors();
  if (detector.betas.size() != detectors.size()) {
    throw DataError("zero-shot detector has " + std::to_string(detector.betas.size()) +
                    " weights for a bank of " + std::to_string(detectors.size()));
  }
  if (!detectors.empty() && x.size() != detector.bank.dim()) {
    throw DataError("feature dimension " + std::to_string(x.size()) +
                    " does not match bank dimension " + std::to_string(detector.bank.dim()));
  }
  double total = 0.0;
  for (std::size_t j = 0; j < detectors.size(); ++j) {
    total += detector.betas[j] * dot(detectors[j].weights, x);
  }
  return total + detector.bias;
}

std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t top_k) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  order.resize(std::min(top_k, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

ZeroShotDetector compose_zero_shot(std::string_view target, const DetectorBank& bank,
                                   const EmbeddingStore& store, std::optional<std::size_t> top_k,
                                   double bias) {
  if (top_k && *top_k == 0) {
    throw std::invalid_argument("top_k must be positive");
  }
  ZeroShotDetector zs;
  zs.target = normalize_token(target);
  zs.bias = bias;
  zs.bank = bank;
  const auto concepts = bank.concepts();
  zs.betas = similarity_vector(target, concepts, store);
  if (top_k && *top_k < zs.betas.size()) {
    std::vector<double> kept(zs.betas.size(), 0.0);
    for (std::size_t j : top_k_indices(zs.betas, *top_k)) kept[j] = zs.betas[j];
    zs.betas = std::move(kept);
  }
  return zs;
}

DetectorBank read_bank(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    const auto dim = doc.at("dim").get<std::size_t>();
    const bool normalized = doc.at("normalized").get<bool>();
    std::vector<LinearDetector> detectors;
    for (const auto& item : doc.at("detectors")) {
      LinearDetector det;
      det.concept_name = item.at("concept").get<std::string>();
      det.weights = item.at("weights").get<std::vector<double>>();
      det.original_norm = item.at("original_norm").get<double>();
      detectors.push_back(std::move(det));
    }
    return DetectorBank::restore(dim, std::move(detectors), normalized);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed detector bank: ") + e.what());
  }
}

DetectorBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open detector bank " + path.string());
  }
  return read_bank(in);
}

void write_bank(std::ostream& out, const DetectorBank& bank) {
  nlohmann::json doc;
  doc["dim"] = bank.dim();
  doc["normalized"] = bank.normalized();
  doc["detectors"] = nlohmann::json::array();
  for (const auto& det : bank.detectors()) {
    doc["detectors"].push_back({{"concept", det.concept_name},
                                {"weights", det.weights},
                                {"original_norm", det.original_norm}});
  }
  out << doc.dump(2) << '\n';
}

void save_bank(const std::filesystem::path& path, const DetectorBank& bank) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write detector bank " + path.string());
  }
  write_bank(out, bank);
}

}  // namespace fewshot
