#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fewshot/error.hpp"
#include "fewshot/model_io.hpp"
#include "oracles.hpp"

using namespace fewshot;

TEST(ModelIo, RoundTripScoresBitIdentical) {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = oracle::random_samples(rng, 25, 5, 0.4);
    const auto kernel = trial % 2 ? KernelSpec::gaussian(0.37) : KernelSpec::linear();
    const auto model = train_svm(s, {}, kernel);
    std::stringstream io;
    write_model(io, model);
    const auto back = read_model(io);
    EXPECT_FALSE(back.adaptation.has_value());
    EXPECT_EQ(back.model.bias, model.bias);
    EXPECT_EQ(back.model.dual_coeffs, model.dual_coeffs);
    EXPECT_EQ(back.model.kernel.kind, model.kernel.kind);
    for (int i = 0; i < 20; ++i) {
      const auto x = oracle::random_vector(rng, 5);
      EXPECT_EQ(score(back.model, x), score(model, x));
    }
  }
}

TEST(ModelIo, AdaptationBlock) {
  std::mt19937_64 rng(97);
  const auto store = oracle::random_store(rng, 4, 6);
  const auto bank = oracle::random_bank(rng, 4, 5);
  const auto s = oracle::random_samples(rng, 6, 5);
  const auto det = adapt(s, bank, "target", store);
  std::stringstream io;
  write_model(io, det);
  const auto back = read_model(io);
  ASSERT_TRUE(back.adaptation.has_value());
  EXPECT_EQ(back.adaptation->target, "target");
  EXPECT_EQ(back.adaptation->n_real, 6u);
  EXPECT_EQ(back.adaptation->n_pseudo, det.n_pseudo);
  EXPECT_EQ(back.adaptation->lambda, 0.5);
}

TEST(ModelIo, MalformedIsDataError) {
  std::istringstream missing("{\"kernel\": {\"kind\": \"linear\", \"bandwidth\": 1}}");
  EXPECT_THROW(read_model(missing), DataError);
  std::istringstream junk("not json");
  EXPECT_THROW(read_model(junk), DataError);
  std::istringstream kernel(
      "{\"kernel\":{\"kind\":\"poly\",\"bandwidth\":1},\"c_param\":1,\"bias\":0,\"dim\":1,"
      "\"support\":[],\"dual_coeffs\":[]}");
  EXPECT_THROW(read_model(kernel), DataError);
}
