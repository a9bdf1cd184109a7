#include <gtest/gtest.h>

#include "bnx/compiler.hpp"
#include "bnx/error.hpp"
#include "bnx/monotone.hpp"
#include "generators.hpp"

namespace bnx {
namespace {

using testing::Rng;

std::shared_ptr<Manager> binary_manager(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n; ++j) names.push_back("X" + std::to_string(j));
  return Manager::create(VariableTable::binary(names));
}

// Direct check over all comparable pairs differing in one coordinate, which
// suffices by transitivity.
bool brute_monotone(const Diagram& f) {
  const auto& vars = f.variables();
  for (std::uint64_t r = 0; r < vars.space_size(); ++r) {
    auto y = instance_from_rank(vars, r);
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] == 1) continue;
      auto up = y;
      up[j] = 1;
      if (evaluate(f, y) && !evaluate(f, up)) return false;
    }
  }
  return true;
}

TEST(Monotone, AdmissionsIsMonotone) {
  const auto f = compile_naive_bayes(testing::admissions()).odd;
  const auto r = is_monotone(f);
  EXPECT_TRUE(r.monotone);
  EXPECT_FALSE(r.witness);
}

TEST(Monotone, NegationIsMonotoneUnderFullFlip) {
  auto mgr = binary_manager(3);
  const auto f = complement(combine(literal(mgr, 0, 1), literal(mgr, 2, 1), BoolOp::disj));
  EXPECT_FALSE(is_monotone(f).monotone);
  EXPECT_TRUE(is_monotone(f, {true, true, true}).monotone);
  EXPECT_TRUE(is_monotone(f, {true, false, true}).monotone);
  EXPECT_THROW(is_monotone(f, {true}), Error);
}

TEST(Monotone, WitnessViolatesDefinition) {
  auto mgr = binary_manager(2);
  const auto f = combine(literal(mgr, 0, 0), literal(mgr, 1, 1), BoolOp::conj);
  const auto r = is_monotone(f);
  ASSERT_FALSE(r.monotone);
  ASSERT_TRUE(r.witness);
  const auto& [lo, hi] = *r.witness;
  EXPECT_TRUE(evaluate(f, lo));
  EXPECT_FALSE(evaluate(f, hi));
  EXPECT_EQ(r.violating, std::vector<std::size_t>{0});
}

TEST(Monotone, AgreesWithBruteForce) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto mgr = binary_manager(std::uniform_int_distribution<std::size_t>(1, 6)(rng));
    const auto f = trial % 2 ? testing::random_function(mgr, rng) : testing::random_monotone_function(mgr, rng);
    const auto r = is_monotone(f);
    ASSERT_EQ(r.monotone, brute_monotone(f)) << "trial " << trial;
    if (r.witness) {
      EXPECT_TRUE(evaluate(f, r.witness->first));
      EXPECT_FALSE(evaluate(f, r.witness->second));
    }
  }
}

TEST(Monotone, NonBinaryUnsupported) {
  auto mgr = Manager::create(VariableTable({{"A", {"a", "b", "c"}}}));
  try {
    is_monotone(literal(mgr, 0, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported);
  }
}

TEST(Match, ComparesSupportingFeatures) {
  PartialInstance z(4);
  z.set(0, 1);
  z.set(3, 1);
  EXPECT_TRUE(match({1, 0, 0, 1}, z, true));
  EXPECT_FALSE(match({1, 1, 0, 1}, z, true));
  EXPECT_FALSE(match({1, 0, 0, 0}, z, true));
  PartialInstance neg(4);
  neg.set(2, 0);
  neg.set(3, 0);
  EXPECT_TRUE(match({1, 1, 0, 0}, neg, false));
  EXPECT_FALSE(match({1, 0, 0, 0}, neg, false));
}

TEST(McShortestPi, HoldsOnAdmissions) {
  const auto f = compile_naive_bayes(testing::admissions()).odd;
  for (const auto& row : testing::admissions_table()) EXPECT_TRUE(mc_matches_shortest_pi(f, row.x));
}

TEST(McShortestPi, HoldsOnRandomMonotoneFunctions) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto mgr = binary_manager(std::uniform_int_distribution<std::size_t>(1, 6)(rng));
    const auto f = testing::random_monotone_function(mgr, rng);
    const auto x = testing::random_instance(mgr->variables(), rng);
    ASSERT_TRUE(mc_matches_shortest_pi(f, x)) << "trial " << trial;
  }
}

TEST(McShortestPi, AliasAgrees) {
  const auto f = compile_naive_bayes(testing::admissions()).odd;
  EXPECT_EQ(verify_theorem4(f, {1, 1, 1, 1}), mc_matches_shortest_pi(f, {1, 1, 1, 1}));
}

TEST(McShortestPi, RequiresMonotonicity) {
  auto mgr = binary_manager(2);
  const auto f = combine(literal(mgr, 0, 0), literal(mgr, 1, 1), BoolOp::conj);
  try {
    mc_matches_shortest_pi(f, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

}  // namespace
}  // namespace bnx
