#include "fewshot/sample_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "fewshot/error.hpp"
#include "fewshot/numeric_text.hpp"

namespace fewshot {
namespace {

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

std::size_t parse_index(std::string_view text, std::size_t line_no) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw DataError("line " + std::to_string(line_no) + ": malformed index '" +
                    std::string(text) + "'");
  }
  return value;
}

}  // namespace

void validate_samples(std::span<const LabeledSample> samples, std::size_t dim) {
  if (dim == 0 && !samples.empty()) dim = samples.front().features.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.label != 1 && s.label != -1) {
      throw DataError("sample " + std::to_string(i) + " has label " + std::to_string(s.label) +
                      "; expected +1 or -1");
    }
    if (s.features.size() != dim) {
      throw DataError("sample " + std::to_string(i) + " has dimension " +
                      std::to_string(s.features.size()) + ", expected " + std::to_string(dim));
    }
    for (double v : s.features) {
      if (!std::isfinite(v)) {
        throw DataError("sample " + std::to_string(i) + " has a non-finite feature");
      }
    }
  }
}

SampleFile read_sample_file(std::istream& in) {
  SampleFile file;
  bool have_dim = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = fields_of(line);
    if (fields.empty()) continue;
    if (fields[0].starts_with('#')) {
      if (fields[0] == "#dim") {
        if (have_dim || fields.size() != 2) {
          throw DataError("line " + std::to_string(line_no) + ": malformed '#dim' header");
        }
        file.dim = parse_index(fields[1], line_no);
        if (file.dim == 0) {
          throw DataError("'#dim' must be positive");
        }
        have_dim = true;
      }
      continue;
    }
    if (!have_dim) {
      throw DataError("sample file is missing its '#dim <d>' header");
    }
    std::vector<double> x(file.dim, 0.0);
    std::size_t previous = 0;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto colon = fields[f].find(':');
      if (colon == std::string_view::npos) {
        throw DataError("line " + std::to_string(line_no) + ": expected '<index>:<value>'");
      }
      const std::size_t index = parse_index(fields[f].substr(0, colon), line_no);
      if (index == 0 || index > file.dim) {
        throw DataError("line " + std::to_string(line_no) + ": index " + std::to_string(index) +
                        " outside 1.." + std::to_string(file.dim));
      }
      if (index <= previous) {
        throw DataError("line " + std::to_string(line_no) + ": indices must be ascending");
      }
      previous = index;
      const double value = parse_real(fields[f].substr(colon + 1));
      if (!std::isfinite(value)) {
        throw DataError("line " + std::to_string(line_no) + ": non-finite value");
      }
      x[index - 1] = value;
    }
    file.labels.emplace_back(fields[0]);
    file.features.push_back(std::move(x));
  }
  if (!have_dim) {
    throw DataError("sample file is missing its '#dim <d>' header");
  }
  return file;
}

SampleFile load_sample_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open sample file " + path.string());
  }
  return read_sample_file(in);
}

void write_sample_file(std::ostream& out, const SampleFile& file) {
  out << "#dim " << file.dim << '\n';
  for (std::size_t i = 0; i < file.features.size(); ++i) {
    out << file.labels.at(i);
    const auto& x = file.features[i];
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] != 0.0) out << ' ' << (k + 1) << ':' << format_real(x[k]);
    }
    out << '\n';
  }
}

std::vector<LabeledSample> to_binary_samples(const SampleFile& file) {
  std::vector<LabeledSample> samples;
  samples.reserve(file.features.size());
  for (std::size_t i = 0; i < file.features.size(); ++i) {
    const auto& label = file.labels[i];
    int y = 0;
    if (label == "+1" || label == "1") {
      y = 1;
    } else if (label == "-1") {
      y = -1;
    } else {
      throw DataError("sample " + std::to_string(i) + " has non-binary label '" + label + "'");
    }
    samples.push_back({file.features[i], y});
  }
  return samples;
}

SampleFile from_binary_samples(std::span<const LabeledSample> samples, std::size_t dim) {
  validate_samples(samples, dim);
  SampleFile file;
  file.dim = dim;
  for (const auto& s : samples) {
    file.labels.emplace_back(s.label > 0 ? "+1" : "-1");
    file.features.push_back(s.features);
  }
  return file;
}

std::vector<LabeledSample> load_binary_samples(const std::filesystem::path& path) {
  return to_binary_samples(load_sample_file(path));
}

void save_binary_samples(const std::filesystem::path& path,
                         std::span<const LabeledSample> samples, std::size_t dim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write sample file " + path.string());
  }
  write_sample_file(out, from_binary_samples(samples, dim));
}

}  // namespace fewshot
