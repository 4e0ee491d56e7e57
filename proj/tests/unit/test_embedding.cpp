#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fewshot/embedding.hpp"
#include "fewshot/error.hpp"
#include "oracles.hpp"

using namespace fewshot;

namespace {

EmbeddingStore parse(const std::string& text) {
  std::istringstream in(text);
  return parse_embeddings(in);
}

}  // namespace

TEST(Embedding, ParsesHeaderAndLines) {
  const auto store = parse("2 3\ncar 1 0 0\ntruck 0.5 0.5 0\n");
  EXPECT_EQ(store.size(), 2u);
  EXPECT_EQ(store.dim(), 3u);
  ASSERT_NE(store.find("truck"), nullptr);
  EXPECT_EQ((*store.find("truck"))[1], 0.5);
}

TEST(Embedding, ShortLineIsDimensionError) {
  EXPECT_THROW(parse("2 3\ncar 1 0 0\ntruck 1 0\n"), DataError);
}

TEST(Embedding, DuplicateTokenRejected) {
  EXPECT_THROW(parse("2 3\ncar 1 0 0\ncar 0 1 0\n"), DataError);
}

TEST(Embedding, CountMismatchRejected) {
  EXPECT_THROW(parse("3 2\na 1 0\nb 0 1\n"), DataError);
}

TEST(Embedding, NonFiniteRejected) {
  EXPECT_THROW(parse("1 2\na nan 0\n"), DataError);
}

TEST(Embedding, TokensAreNormalized) {
  EXPECT_EQ(normalize_token("Sitting Down"), "sitting_down");
  const auto store = parse("1 2\nSitting_Down 1 2\n");
  EXPECT_TRUE(store.contains("sitting down"));
}

TEST(Embedding, WriteParseRoundTrip) {
  std::mt19937_64 rng(3);
  const auto store = oracle::random_store(rng, 5, 7);
  std::ostringstream out;
  write_embeddings(out, store);
  const auto back = parse(out.str());
  ASSERT_EQ(back.size(), store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    EXPECT_EQ(back.entries()[i].token, store.entries()[i].token);
    EXPECT_EQ(back.entries()[i].vector, store.entries()[i].vector);
  }
}

TEST(Similarity, SameTokenIsOne) {
  const auto store = parse("1 3\ncar 0.3 -2 5\n");
  EXPECT_DOUBLE_EQ(similarity("car", "car", store), 1.0);
}

TEST(Similarity, OrthogonalIsZero) {
  const auto store = parse("2 3\na 1 0 0\nb 0 1 0\n");
  EXPECT_EQ(similarity("a", "b", store), 0.0);
}

TEST(Similarity, EightNinths) {
  const auto store = parse("2 3\na 1 2 2\nb 2 1 2\n");
  EXPECT_NEAR(similarity("a", "b", store), 8.0 / 9.0, 1e-15);
}

TEST(Similarity, UnknownTokenIsDataError) {
  const auto store = parse("1 2\na 1 0\n");
  EXPECT_THROW(similarity("a", "zebra", store), DataError);
}

TEST(Similarity, ZeroVectorIsDataError) {
  const auto store = parse("2 2\na 1 0\nz 0 0\n");
  EXPECT_THROW(similarity("a", "z", store), DataError);
}

TEST(Similarity, MultiWordFallsBackToMean) {
  const auto store = parse("3 2\nred 1 0\ncar 0 1\ntruck 1 1\n");
  // mean of red and car is (0.5, 0.5), parallel to truck
  EXPECT_NEAR(similarity("red car", "truck", store), 1.0, 1e-15);
  EXPECT_THROW(similarity("red bus", "truck", store), DataError);
}

TEST(SimilarityVector, Cases) {
  const auto store = parse("3 3\na 1 0 0\nb 0 1 0\nc 0 0 1\n");
  const std::vector<std::string> self{"a"};
  EXPECT_EQ(similarity_vector("a", self, store), std::vector<double>{1.0});
  EXPECT_TRUE(similarity_vector("a", std::vector<std::string>{}, store).empty());
  const std::vector<std::string> all{"a", "b", "c"};
  EXPECT_EQ(similarity_vector("a", all, store), (std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(SimilarityProperty, SymmetricBoundedScaleInvariant) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_vector(rng, 9);
    auto b = oracle::random_vector(rng, 9);
    const double ab = cosine_similarity(a, b);
    EXPECT_NEAR(ab, cosine_similarity(b, a), 1e-12);
    EXPECT_LE(std::abs(ab), 1.0 + 1e-12);
    for (auto& x : b) x *= 7.3;
    EXPECT_NEAR(cosine_similarity(a, b), ab, 1e-9);
  }
}
