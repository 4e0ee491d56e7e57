#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fewshot {

// A training or pseudo sample. label is exactly -1 or +1.
struct LabeledSample {
  std::vector<double> features;
  int label = 1;
};

// Throws DataError if a label is not +-1, a feature is non-finite, or
// dimensions disagree with `dim` (or with each other when dim is 0).
void validate_samples(std::span<const LabeledSample> samples, std::size_t dim = 0);

// Contents of a sparse sample file. Labels are kept as written: "+1"/"-1"
// for binary data or a class token for multi-class data.
struct SampleFile {
  std::size_t dim = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> features;
};

// Sparse text format:
//   #dim <d>
//   <label> <index>:<value> ...
// Indices are 1-based and strictly ascending; unlisted indices are zero.
// Other lines beginning with '#' are comments.
SampleFile read_sample_file(std::istream& in);
SampleFile load_sample_file(const std::filesystem::path& path);
void write_sample_file(std::ostream& out, const SampleFile& file);

// Requires every label to be "+1", "1" or "-1".
std::vector<LabeledSample> to_binary_samples(const SampleFile& file);
SampleFile from_binary_samples(std::span<const LabeledSample> samples, std::size_t dim);

std::vector<LabeledSample> load_binary_samples(const std::filesystem::path& path);
void save_binary_samples(const std::filesystem::path& path,
                         std::span<const LabeledSample> samples, std::size_t dim);

}  // namespace fewshot
