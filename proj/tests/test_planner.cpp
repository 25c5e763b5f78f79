#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pram/planner.hpp"
#include "reference_data.hpp"

using namespace pram;

namespace {

FrequencyTable demo_table() {
  std::vector<std::string> labels;
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i < refdata::kDemoCounts.size(); ++i) {
    labels.push_back(std::string(1, static_cast<char>('a' + i)));
    counts.push_back(refdata::kDemoCounts[i]);
  }
  return validate_frequency_table(labels, counts);
}

}  // namespace

TEST_CASE("risk bound endpoints and monotonicity") {
  for (std::int64_t t1 : {1, 2, 3, 10, 100, 1000}) {
    const double t = static_cast<double>(t1);
    CHECK(psi(t1, 0.0) == doctest::Approx(1.0 / t).epsilon(1e-15));
    CHECK(psi(t1, t) == 0.0);
    double prev = psi(t1, 0.0);
    for (int step = 1; step <= 64; ++step) {
      const double theta = t * static_cast<double>(step) / 64.0;
      const double value = psi(t1, theta);
      CHECK(value < prev);
      prev = value;
    }
  }
  CHECK_THROWS_AS(psi(0, 0.0), ValidationError);
  CHECK_THROWS_AS(psi(2, -0.1), ValidationError);
  CHECK_THROWS_AS(psi(2, 2.5), ValidationError);
}

TEST_CASE("level equation roots match frozen values") {
  CHECK(solve_theta(2, 0.1) ==
        doctest::Approx(refdata::kThetaT2Xi01).epsilon(1e-15));
  CHECK(solve_theta(2, 0.1) ==
        doctest::Approx(4.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-15));
  CHECK(solve_theta(1, 0.1) ==
        doctest::Approx(refdata::kThetaT1Xi01).epsilon(1e-15));
  CHECK(solve_theta(3, 0.25) ==
        doctest::Approx(refdata::kThetaT3Xi025).epsilon(1e-15));
  CHECK(solve_theta(3, 0.25) ==
        doctest::Approx((std::sqrt(13.0) - 1.0) / 2.0).epsilon(1e-15));
  CHECK(solve_theta(1, 0.5) ==
        doctest::Approx(refdata::kThetaT1Xi05).epsilon(1e-15));
  CHECK(solve_theta(1, 0.5) ==
        doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));

  CHECK_THROWS_AS(solve_theta(2, 0.5), ValidationError);
  CHECK_THROWS_AS(solve_theta(10, 0.1), ValidationError);
  CHECK_THROWS_AS(solve_theta(2, 0.0), ValidationError);
  CHECK_THROWS_AS(solve_theta(2, 1.0), ValidationError);
  CHECK_THROWS_AS(solve_theta(0, 0.1), ValidationError);
}

TEST_CASE("level equation agrees with bisection across random inputs") {
  std::mt19937_64 rng(20260819);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double log_t1 = unit(rng) * 4.0;
    const auto t1 = static_cast<std::int64_t>(std::floor(std::pow(10.0, log_t1)));
    const double cap = 1.0 / static_cast<double>(t1);
    const double xi = cap * (0.02 + 0.96 * unit(rng));
    const double solved = solve_theta(t1, xi);
    const double bisected = oracle::bisect_psi_root(t1, xi);
    CHECK(std::abs(solved - bisected) <=
          1e-9 * std::max(1.0, std::abs(bisected)));
    CHECK(std::abs(psi(t1, solved) - xi) <= 1e-10);
  }
}

TEST_CASE("minimum block size matches the frozen table") {
  for (std::size_t r = 0; r < refdata::kBlockTable.size(); ++r) {
    for (std::size_t c = 0; c < refdata::kTableXi.size(); ++c) {
      CHECK(min_block_size(static_cast<std::int64_t>(r + 1),
                           refdata::kTableXi[c]) == refdata::kBlockTable[r][c]);
    }
  }
  const auto table = block_size_table();
  for (std::size_t r = 0; r < table.size(); ++r)
    for (std::size_t c = 0; c < table[r].size(); ++c)
      CHECK(table[r][c] == refdata::kBlockTable[r][c]);
}

TEST_CASE("minimum block size special cases and monotonicity") {
  CHECK(min_block_size(10, 0.3) == 2);
  CHECK(min_block_size(1, 0.1) == 11);
  CHECK(min_block_size(1, 1.0 / 9.0) == 10);
  CHECK(min_block_size(2, 0.5) == 2);

  for (std::int64_t t1 = 1; t1 <= 30; ++t1) {
    int prev = 1 << 20;
    for (double xi : {0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8}) {
      const int k = min_block_size(t1, xi);
      CHECK(k <= prev);
      CHECK(k >= 2);
      prev = k;
    }
  }
  for (double xi : refdata::kTableXi) {
    int prev = 1 << 20;
    for (std::int64_t t1 = 1; t1 <= 50; ++t1) {
      const int k = min_block_size(t1, xi);
      CHECK(k <= prev);
      prev = k;
    }
  }
}

TEST_CASE("planner reproduces the worked example") {
  const FrequencyTable freq = demo_table();
  const BlockPlan plan = plan_blocks(freq, 0, refdata::kDemoXi);
  CHECK_FALSE(plan.is_noop());
  CHECK_FALSE(plan.relaxed());
  CHECK(plan.xi_achieved == refdata::kDemoXi);
  CHECK(plan.theta == doctest::Approx(refdata::kDemoTheta).epsilon(1e-15));
  CHECK(plan.k1 == refdata::kDemoK1);
  CHECK(plan.target_block() ==
        std::vector<int>(refdata::kDemoBlock.begin(), refdata::kDemoBlock.end()));
  CHECK(plan.blocks.size() == 3);
  CHECK(plan.blocks[1] == std::vector<int>{2});
  CHECK(plan.blocks[2] == std::vector<int>{6});
}

TEST_CASE("planner emits a no-op when the raw release is already safe") {
  const FrequencyTable freq = validate_frequency_table({"a", "b"}, {5, 5});
  const BlockPlan plan = plan_blocks(freq, 0, 0.5);
  CHECK(plan.is_noop());
  CHECK(plan.theta == 0.0);
  CHECK(plan.xi_achieved == 0.5);
  CHECK_FALSE(plan.relaxed());

  const FrequencyTable tens = validate_frequency_table({"a", "b"}, {10, 10});
  CHECK(plan_blocks(tens, 0, 0.1).is_noop());
}

TEST_CASE("planner relaxes an infeasible level to the coarser grid") {
  const FrequencyTable freq = validate_frequency_table({"a", "b", "c"},
                                                       {1, 5, 9});
  const BlockPlan plan = plan_blocks(freq, 0, 0.1);
  CHECK(plan.relaxed());
  CHECK(plan.xi_achieved == 0.5);
  CHECK(plan.theta == doctest::Approx(refdata::kThetaT1Xi05).epsilon(1e-15));
  CHECK(plan.k1 == 3);
  CHECK(plan.target_block() == std::vector<int>{0, 1, 2});
}

TEST_CASE("planner relaxes to a no-op when the grid reaches 1/T1") {
  const FrequencyTable freq = validate_frequency_table({"a", "b", "c"},
                                                       {3, 1, 1});
  const BlockPlan plan = plan_blocks(freq, 0, 0.05);
  CHECK(plan.is_noop());
  CHECK(plan.relaxed());
  CHECK(plan.xi_achieved == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const FrequencyTable lopsided = validate_frequency_table({"a", "b", "c"},
                                                           {10, 3, 2});
  const BlockPlan fallback = plan_blocks(lopsided, 0, 0.05);
  CHECK(fallback.is_noop());
  CHECK(fallback.relaxed());
  CHECK(fallback.xi_achieved == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("planner reports the best achievable bound when stuck") {
  const FrequencyTable alone = validate_frequency_table({"a", "b"}, {1, 0});
  try {
    plan_blocks(alone, 0, 0.1);
    FAIL("expected a planning error");
  } catch (const PlanningError& e) {
    CHECK(e.best_achievable_xi() == 1.0);
  }

  const FrequencyTable one_partner = validate_frequency_table({"a", "b"},
                                                              {1, 5});
  try {
    plan_blocks(one_partner, 0, 0.1);
    FAIL("expected a planning error");
  } catch (const PlanningError& e) {
    CHECK(e.best_achievable_xi() ==
          doctest::Approx(psi(1, 0.5)).epsilon(1e-15));
    CHECK(e.best_achievable_xi() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("planner validates its arguments") {
  const FrequencyTable freq = demo_table();
  CHECK_THROWS_AS(plan_blocks(freq, -1, 0.1), ValidationError);
  CHECK_THROWS_AS(plan_blocks(freq, 8, 0.1), ValidationError);
  CHECK_THROWS_AS(plan_blocks(freq, 0, 0.0), ValidationError);
  CHECK_THROWS_AS(plan_blocks(freq, 0, 1.0), ValidationError);
  const FrequencyTable zero = validate_frequency_table({"a", "b"}, {0, 7});
  CHECK_THROWS_AS(plan_blocks(zero, 0, 0.1), ValidationError);
}
