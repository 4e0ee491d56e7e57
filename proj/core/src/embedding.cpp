#include "fewshot/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fewshot/error.hpp"
#include "fewshot/numeric_text.hpp"

namespace fewshot {
namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
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

std::size_t parse_count(std::string_view field, const char* what) {
  if (field.empty() || !std::all_of(field.begin(), field.end(),
                                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw DataError(std::string("malformed embedding header: bad ") + what);
  }
  return static_cast<std::size_t>(std::stoull(std::string(field)));
}

}  // namespace

std::string normalize_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (c == ' ') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) {
    throw DataError("embedding dimension must be positive");
  }
}

void EmbeddingStore::add(std::string_view token, std::vector<double> vector) {
  std::string key = normalize_token(token);
  if (key.empty()) {
    throw DataError("empty embedding token");
  }
  if (vector.size() != dim_) {
    throw DataError("dimension mismatch for token '" + key + "': expected " +
                    std::to_string(dim_) + ", got " + std::to_string(vector.size()));
  }
  if (!std::all_of(vector.begin(), vector.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("non-finite value in embedding for token '" + key + "'");
  }
  if (index_.contains(key)) {
    throw DataError("duplicate token '" + key + "'");
  }
  index_.emplace(key, entries_.size());
  entries_.push_back({std::move(key), std::move(vector)});
}

bool EmbeddingStore::contains(std::string_view token) const { return find(token) != nullptr; }

const std::vector<double>* EmbeddingStore::find(std::string_view token) const {
  auto it = index_.find(normalize_token(token));
  return it == index_.end() ? nullptr : &entries_[it->second].vector;
}

std::vector<double> EmbeddingStore::resolve(std::string_view token) const {
  const std::string key = normalize_token(token);
  if (const auto* direct = find(key)) {
    return *direct;
  }
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= key.size()) {
    std::size_t end = key.find('_', start);
    if (end == std::string::npos) end = key.size();
    if (end > start) parts.push_back(std::string_view(key).substr(start, end - start));
    start = end + 1;
  }
  if (parts.size() < 2) {
    throw DataError("unknown token '" + key + "'");
  }
  std::vector<double> mean(dim_, 0.0);
  for (auto part : parts) {
    const auto* vec = find(part);
    if (vec == nullptr) {
      throw DataError("unknown token '" + key + "' (constituent '" + std::string(part) +
                      "' missing)");
    }
    for (std::size_t i = 0; i < dim_; ++i) mean[i] += (*vec)[i];
  }
  for (double& v : mean) v /= static_cast<double>(parts.size());
  return mean;
}

EmbeddingStore parse_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("malformed embedding header: empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_spaces(line);
  if (header.size() != 2) {
    throw DataError("malformed embedding header: expected '<count> <dim>'");
  }
  const std::size_t count = parse_count(header[0], "count");
  const std::size_t dim = parse_count(header[1], "dim");
  if (dim == 0) {
    throw DataError("malformed embedding header: dim must be positive");
  }

  EmbeddingStore store(dim);
  std::size_t line_no = 1;
  while (store.size() < count && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1) {
      throw DataError("dimension mismatch on line " + std::to_string(line_no) + ": expected " +
                      std::to_string(dim) + " values, got " + std::to_string(fields.size() - 1));
    }
    std::vector<double> vec(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      vec[i] = parse_real(fields[i + 1]);
    }
    store.add(fields[0], std::move(vec));
  }
  if (store.size() != count) {
    throw DataError("embedding file declares " + std::to_string(count) + " entries but has " +
                    std::to_string(store.size()));
  }
  while (std::getline(in, line)) {
    if (!split_spaces(line).empty()) {
      throw DataError("embedding file has more entries than its header declares");
    }
  }
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open embedding file " + path.string());
  }
  return parse_embeddings(in);
}

void write_embeddings(std::ostream& out, const EmbeddingStore& store) {
  out << store.size() << ' ' << store.dim() << '\n';
  for (const auto& entry : store.entries()) {
    out << entry.token;
    for (double v : entry.vector) out << ' ' << format_real(v);
    out << '\n';
  }
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write embedding file " + path.string());
  }
  write_embeddings(out, store);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("similarity of vectors with different lengths");
  }
  const double na = std::sqrt(squared_norm(a));
  const double nb = std::sqrt(squared_norm(b));
  if (na == 0.0 || nb == 0.0) {
    throw DataError("similarity undefined for a zero-norm vector");
  }
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double similarity(std::string_view a, std::string_view b, const EmbeddingStore& store) {
  const auto va = store.resolve(a);
  const auto vb = store.resolve(b);
  try {
    return cosine_similarity(va, vb);
  } catch (const DataError&) {
    throw DataError("similarity undefined: zero-norm vector for '" + std::string(a) + "' or '" +
                    std::string(b) + "'");
  }
}

std::vector<double> similarity_vector(std::string_view target,
                                      std::span<const std::string> concepts,
                                      const EmbeddingStore& store) {
  std::vector<double> sims;
  sims.reserve(concepts.size());
  for (const auto& concept_token : concepts) {
    sims.push_back(similarity(concept_token, target, store));
  }
  return sims;
}

}  // namespace fewshot
