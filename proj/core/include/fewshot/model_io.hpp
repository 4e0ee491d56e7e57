#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fewshot/adaptation.hpp"
#include "fewshot/kernel_svm.hpp"

namespace fewshot {

// Provenance recorded alongside a model produced by adapt().
struct AdaptationInfo {
  std::string target;
  std::size_t n_real = 0;
  std::size_t n_pseudo = 0;
  double lambda = kDefaultLambda;
};

struct ModelFile {
  DualModel model;
  std::optional<AdaptationInfo> adaptation;
};

// JSON with kernel spec, c_param, bias, dim, support samples and dual
// coefficients. Doubles are written in shortest round-trip form, so a
// read-back model scores bit-identically.
void write_model(std::ostream& out, const DualModel& model);
void write_model(std::ostream& out, const FewShotDetector& detector);
ModelFile read_model(std::istream& in);

ModelFile load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const DualModel& model);
void save_model(const std::filesystem::path& path, const FewShotDetector& detector);

}  // namespace fewshot
