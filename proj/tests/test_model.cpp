#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fogran/config.hpp"
#include "fogran/model.hpp"
#include "fogran/simulator.hpp"

using namespace fogran;

TEST(ValidateParams, AcceptsInRange) {
  EXPECT_TRUE(validate_params({0.5, 0.25, 0.1, 2}).ok);
  EXPECT_TRUE(validate_params({0.0, 0.0, 0.0, 2}).ok);
  EXPECT_TRUE(validate_params({1.0, 5.0, 5.0, 100}).ok);
}

TEST(ValidateParams, RejectsWithField) {
  const auto v = validate_params({1.2, 0.25, 0.1, 2});
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.field, "mu");
  EXPECT_EQ(validate_params({0.5, -0.1, 0.0, 2}).field, "r_f");
  EXPECT_EQ(validate_params({0.5, 0.1, -1.0, 2}).field, "r_d");
  EXPECT_EQ(validate_params({0.5, 0.1, 0.0, 1}).field, "n_files");
  EXPECT_EQ(validate_params({std::nan(""), 0.1, 0.0, 2}).field, "mu");
  EXPECT_EQ(validate_params({0.5, kInf, 0.0, 2}).field, "r_f");
}

TEST(ValidateParams, RequireValidThrowsNamedField) {
  try {
    require_valid(SystemParams{0.5, 0.1, -2.0, 2});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "r_d");
  }
}

TEST(ValidateScale, BlocksMustDivideFileBits) {
  EXPECT_TRUE(validate_scale({1000, 10.0, 10}).ok);
  EXPECT_EQ(validate_scale({1000, 10.0, 7}).field, "blocks");
  EXPECT_EQ(validate_scale({0, 10.0, 1}).field, "file_bits");
  EXPECT_EQ(validate_scale({1000, 0.0, 1}).field, "log_p");
}

TEST(WorstCaseDemands, TwoClasses) {
  const std::vector<DemandVector> expected = {{1, 1}, {1, 2}};
  EXPECT_EQ(worst_case_demands(2), expected);
  EXPECT_EQ(worst_case_demands(5), expected);
  EXPECT_EQ(worst_case_demands(1000), expected);
  EXPECT_THROW(worst_case_demands(1), ValidationError);
}

// Under symmetric placement every one of the N^2 demand vectors costs the same
// as its class representative.
TEST(WorstCaseDemands, BruteForceOverAllDemandVectorsN5) {
  const SimScale scale{10000, 10.0, 10};
  for (const SystemParams p : {SystemParams{0.5, 0.25, 0.25, 5}, SystemParams{0.25, 0.25, 0.0, 5},
                               SystemParams{0.3, 0.5, 0.4, 5}, SystemParams{0.8, 0.1, 0.3, 5}}) {
    const auto pol = synthesize_serial_policy(p);
    const auto sched = block_markov_convert(pol, scale);
    const auto same = run_serial_ti(pol, {1, 1}, p, scale);
    const auto distinct = run_serial_ti(pol, {1, 2}, p, scale);
    const auto same_p = run_pipelined_ti(sched, {1, 1}, p);
    const auto distinct_p = run_pipelined_ti(sched, {1, 2}, p);
    for (int d1 = 1; d1 <= 5; ++d1)
      for (int d2 = 1; d2 <= 5; ++d2) {
        const auto r = run_serial_ti(pol, {d1, d2}, p, scale);
        const auto& rep = d1 == d2 ? same : distinct;
        EXPECT_EQ(r.total_symbols, rep.total_symbols) << d1 << "," << d2;
        EXPECT_EQ(r.busy, rep.busy);
        EXPECT_TRUE(r.decode_success);
        const auto rp = run_pipelined_ti(sched, {d1, d2}, p);
        EXPECT_EQ(rp.total_symbols, (d1 == d2 ? same_p : distinct_p).total_symbols);
        EXPECT_TRUE(rp.decode_success);
      }
    EXPECT_LE(same.total_symbols, distinct.total_symbols);
  }
}

TEST(Config, ParsesKeysCommentsAndLists) {
  const auto cfg = Config::parse("# header\nmu = 0.5  # trailing\n\nr_f=0.25\nr_d = 0\nblocks_list = 1, 10,100\n");
  EXPECT_DOUBLE_EQ(*cfg.number("mu"), 0.5);
  EXPECT_DOUBLE_EQ(*cfg.number("r_f"), 0.25);
  EXPECT_EQ(cfg.list("blocks_list"), (std::vector<double>{1, 10, 100}));
  EXPECT_EQ(cfg.line_of("r_f"), 4);
  const auto p = params_from_config(cfg);
  EXPECT_EQ(p, (SystemParams{0.5, 0.25, 0.0, 2}));
}

TEST(Config, ParseErrorsCarryLineNumbers) {
  auto line_of_error = [](const std::string& text) {
    try {
      Config::parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of_error("mu = 0.5\nbogus = 1\n"), 2);
  EXPECT_EQ(line_of_error("mu = 0.5\n\n# c\nr_f = 0.2x\n"), 4);
  EXPECT_EQ(line_of_error("mu = 0.5\nmu = 0.6\n"), 2);
  EXPECT_EQ(line_of_error("mu 0.5\n"), 1);
  EXPECT_EQ(line_of_error("mu =\n"), 1);
  EXPECT_EQ(line_of_error("blocks_list = 1,,2\n"), 1);
}

TEST(Config, MissingKeyIsValidationError) {
  const auto cfg = Config::parse("mu = 0.5\nr_f = 0.2\n");
  EXPECT_THROW(params_from_config(cfg), ValidationError);
  EXPECT_THROW(params_from_config(Config::parse("mu = 1.5\nr_f = 0\nr_d = 0\n")), ValidationError);
}

TEST(Config, RoundTripIsExact) {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> rate(0.0, 3.0);
  std::uniform_int_distribution<int> files(2, 50);
  for (int i = 0; i < 2000; ++i) {
    const SystemParams p{unit(rng), rate(rng), rate(rng), files(rng)};
    const auto text = to_config_text(p);
    const auto cfg = Config::parse(text);
    EXPECT_EQ(params_from_config(cfg), p);
    EXPECT_EQ(to_config_text(params_from_config(cfg)), text);
  }
  const SystemParams p{0.1, 0.3, 0.7, 3};
  const SimScale s{123400, 17.25, 100};
  const auto cfg = Config::parse(to_config_text(p, s));
  EXPECT_EQ(scale_from_config(cfg), s);
}
