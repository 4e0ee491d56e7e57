#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fewshot {

struct ConceptEmbedding {
  std::string token;
  std::vector<double> vector;
};

// Lowercases and maps spaces to underscores, so "Sitting Down" and
// "sitting_down" address the same entry.
std::string normalize_token(std::string_view token);

/// Word vectors keyed by concept token. Immutable once populated; lookups
/// are safe to share across threads.
///
/// Vectors are kept exactly as ingested (no L2 pre-normalization).
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  /// Adds an entry under the normalized token. Throws DataError on a
  /// duplicate token, wrong length, or a non-finite coordinate.
  void add(std::string_view token, std::vector<double> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(std::string_view token) const;

  /// Exact lookup on the normalized token; nullptr when absent.
  const std::vector<double>* find(std::string_view token) const;

  /// Exact lookup, falling back to the mean of the underscore-separated
  /// constituents for multi-word names. Throws DataError if unresolvable.
  std::vector<double> resolve(std::string_view token) const;

  /// Entries in insertion order.
  std::span<const ConceptEmbedding> entries() const noexcept { return entries_; }

 private:
  std::size_t dim_;
  std::vector<ConceptEmbedding> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Text format: "<count> <dim>" header, then "<token> v1 ... v_dim" per line.
EmbeddingStore parse_embeddings(std::istream& in);
EmbeddingStore load_embeddings(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, const EmbeddingStore& store);
void save_embeddings(const std::filesystem::path& path, const EmbeddingStore& store);

// Cosine of the angle between a and b, clamped to [-1, 1]. Throws DataError
// for a zero-norm vector or mismatched lengths.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

double similarity(std::string_view a, std::string_view b, const EmbeddingStore& store);

// Element j is similarity(concepts[j], target).
std::vector<double> similarity_vector(std::string_view target,
                                      std::span<const std::string> concepts,
                                      const EmbeddingStore& store);

}  // namespace fewshot
