#include "fewshot/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "fewshot/error.hpp"

namespace fewshot {
namespace {

using nlohmann::json;

json model_to_json(const DualModel& model) {
  json doc;
  doc["kernel"] = {{"kind", std::string(to_string(model.kernel.kind))},
                   {"bandwidth", model.kernel.bandwidth}};
  doc["c_param"] = model.c_param;
  doc["bias"] = model.bias;
  doc["dim"] = model.dim;
  doc["support"] = json::array();
  for (const auto& s : model.support) {
    doc["support"].push_back({{"label", s.label}, {"features", s.features}});
  }
  doc["dual_coeffs"] = model.dual_coeffs;
  return doc;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write model file " + path.string());
  }
  writer(out);
}

}  // namespace

void write_model(std::ostream& out, const DualModel& model) {
  out << model_to_json(model).dump(2) << '\n';
}

void write_model(std::ostream& out, const FewShotDetector& detector) {
  json doc = model_to_json(detector.model);
  doc["adaptation"] = {{"target", detector.target},
                       {"n_real", detector.n_real},
                       {"n_pseudo", detector.n_pseudo},
                       {"lambda", detector.config.lambda}};
  out << doc.dump(2) << '\n';
}

ModelFile read_model(std::istream& in) {
  ModelFile file;
  try {
    const json doc = json::parse(in);
    auto& model = file.model;
    const auto& kernel = doc.at("kernel");
    model.kernel.kind = parse_kernel_kind(kernel.at("kind").get<std::string>());
    model.kernel.bandwidth = kernel.at("bandwidth").get<double>();
    model.c_param = doc.at("c_param").get<double>();
    model.bias = doc.at("bias").get<double>();
    model.dim = doc.at("dim").get<std::size_t>();
    for (const auto& s : doc.at("support")) {
      model.support.push_back({s.at("features").get<std::vector<double>>(), s.at("label").get<int>()});
    }
    model.dual_coeffs = doc.at("dual_coeffs").get<std::vector<double>>();
    if (model.dual_coeffs.size() != model.support.size()) {
      throw DataError("model has " + std::to_string(model.support.size()) + " support samples but " +
                      std::to_string(model.dual_coeffs.size()) + " coefficients");
    }
    validate_samples(model.support, model.dim);
    if (doc.contains("adaptation")) {
      const auto& a = doc.at("adaptation");
      file.adaptation = AdaptationInfo{a.at("target").get<std::string>(), a.at("n_real").get<std::size_t>(),
                                       a.at("n_pseudo").get<std::size_t>(), a.at("lambda").get<double>()};
    }
    file.model.kernel.validate();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
  return file;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open model file " + path.string());
  }
  return read_model(in);
}

void save_model(const std::filesystem::path& path, const DualModel& model) {
  write_file(path, [&](std::ostream& out) { write_model(out, model); });
}

void save_model(const std::filesystem::path& path, const FewShotDetector& detector) {
  write_file(path, [&](std::ostream& out) { write_model(out, detector); });
}

}  // namespace fewshot
