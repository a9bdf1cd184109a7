#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "bnx/compiler.hpp"
#include "bnx/diagram.hpp"
#include "bnx/error.hpp"
#include "generators.hpp"

namespace bnx {
namespace {

using testing::Rng;

std::shared_ptr<Manager> binary_manager(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));
  return Manager::create(VariableTable::binary(names));
}

std::shared_ptr<Manager> mixed_manager(Rng& rng, std::size_t n, std::size_t max_domain) {
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = std::uniform_int_distribution<std::size_t>(2, max_domain)(rng);
    Variable v{"V" + std::to_string(i), {}};
    for (std::size_t k = 0; k < b; ++k) v.labels.push_back("v" + std::to_string(k));
    vars.push_back(std::move(v));
  }
  return Manager::create(VariableTable(std::move(vars)));
}

Diagram admissions_odd() {
  return compile_naive_bayes(testing::admissions()).odd;
}

template <typename E>
void expect_error(ErrorKind kind, E&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

TEST(Intern, AllEqualChildrenCollapse) {
  auto mgr = binary_manager(2);
  const NodeId kids[] = {kFalseNode, kFalseNode};
  EXPECT_EQ(mgr->intern(0, kids), kFalseNode);
}

TEST(Intern, HashConsingIsIdempotent) {
  auto mgr = binary_manager(2);
  const NodeId kids[] = {kFalseNode, kTrueNode};
  const auto a = mgr->intern(0, kids);
  const auto before = mgr->allocated();
  EXPECT_EQ(mgr->intern(0, kids), a);
  EXPECT_EQ(mgr->allocated(), before);
}

TEST(Intern, OrderingViolationIsStructuralError) {
  auto mgr = binary_manager(2);
  const NodeId low[] = {kFalseNode, kTrueNode};
  const auto x1 = mgr->intern(0, low);
  const NodeId kids[] = {x1, kTrueNode};
  expect_error(ErrorKind::structural, [&] { mgr->intern(1, kids); });
}

TEST(Intern, WrongArityIsArityError) {
  auto mgr = binary_manager(2);
  const NodeId kids[] = {kFalseNode, kTrueNode, kTrueNode};
  expect_error(ErrorKind::arity, [&] { mgr->intern(0, kids); });
}

TEST(Intern, CompleteModeKeepsTautologyNodes) {
  auto mgr = Manager::create(VariableTable::binary({"A", "B"}), DiagramMode::complete);
  const NodeId kids[] = {kTrueNode, kTrueNode};
  EXPECT_NE(mgr->intern(1, kids), kTrueNode);
  const NodeId dead[] = {kFalseNode, kFalseNode};
  EXPECT_EQ(mgr->intern(1, dead), kFalseNode);
  const NodeId skip[] = {kTrueNode, kFalseNode};
  expect_error(ErrorKind::structural, [&] { mgr->intern(0, skip); });
}

TEST(Evaluate, AdmissionsRows) {
  const auto f = admissions_odd();
  EXPECT_TRUE(evaluate(f, Instance{1, 1, 0, 1}));
  EXPECT_FALSE(evaluate(f, Instance{0, 0, 1, 1}));
  EXPECT_TRUE(evaluate(constant(binary_manager(3), true), Instance{0, 1, 0}));
}

TEST(Evaluate, DomainError) {
  auto f = constant(binary_manager(2), true);
  expect_error(ErrorKind::domain, [&] { evaluate(f, Instance{0, 2}); });
  expect_error(ErrorKind::domain, [&] { evaluate(f, Instance{0}); });
}

TEST(Complement, Examples) {
  auto mgr = binary_manager(2);
  EXPECT_TRUE(complement(constant(mgr, true)).is_false());
  const auto f = admissions_odd();
  EXPECT_EQ(model_count(complement(f)), 10u);
}

TEST(Restrict, Examples) {
  const auto f = admissions_odd();
  const auto w_pos = restrict(f, 0, 1);
  EXPECT_EQ(model_count(w_pos), 2u * 5u);  // W is free in the cofactor: 5 completions, doubled
  auto mgr = binary_manager(2);
  const auto x2 = literal(mgr, 1, 1);
  EXPECT_EQ(restrict(x2, 0, 0), x2);
  const auto both = combine(literal(mgr, 0, 1), x2, BoolOp::conj);
  EXPECT_TRUE(restrict(both, 0, 0).is_false());
  expect_error(ErrorKind::domain, [&] { restrict(both, 0, 2); });
}

TEST(Combine, Examples) {
  auto mgr = binary_manager(2);
  const auto f = combine(literal(mgr, 0, 1), literal(mgr, 1, 0), BoolOp::disj);
  EXPECT_EQ(combine(f, constant(mgr, true), BoolOp::conj), f);
  EXPECT_TRUE(combine(f, complement(f), BoolOp::conj).is_false());
  EXPECT_EQ(model_count(combine(literal(mgr, 0, 1), literal(mgr, 1, 1), BoolOp::disj)), 3u);
  auto other = binary_manager(2);
  expect_error(ErrorKind::manager, [&] { combine(f, constant(other, true), BoolOp::conj); });
}

TEST(ConjoinAssignment, Examples) {
  auto mgr = binary_manager(2);
  PartialInstance a(2);
  a.set(0, 1);
  EXPECT_EQ(conjoin_assignment(constant(mgr, true), a), literal(mgr, 0, 1));
  const auto f = admissions_odd();
  PartialInstance eg(4);
  eg.set(2, 0);
  eg.set(3, 0);
  EXPECT_TRUE(conjoin_assignment(f, eg).is_false());
  EXPECT_EQ(conjoin_assignment(f, PartialInstance(4)), f);
}

TEST(CardinalityMinimize, Examples) {
  auto mgr = binary_manager(3);
  const auto min_taut = cardinality_minimize(constant(mgr, true), count_costs(mgr->variables(), 1));
  EXPECT_EQ(models(min_taut), (std::vector<Instance>{{0, 0, 0}}));
  const auto f = admissions_odd();
  const auto g = cardinality_minimize(f, count_costs(f.variables(), 1));
  EXPECT_EQ(models(g), (std::vector<Instance>{{1, 0, 0, 1}}));
  EXPECT_TRUE(cardinality_minimize(constant(mgr, false), count_costs(mgr->variables(), 1)).is_false());
}

TEST(CardinalityMinimize, ZeroMinimizeNegativeSide) {
  const auto f = admissions_odd();
  const auto nf = complement(f);
  const auto g = cardinality_minimize(nf, count_costs(f.variables(), 0));
  // Fewest "-" among negative rows: the negatives with three "+".
  std::vector<Instance> expected;
  std::size_t best = 99;
  for (const auto& m : models(nf)) best = std::min<std::size_t>(best, std::count(m.begin(), m.end(), 0u));
  for (const auto& m : models(nf)) {
    if (static_cast<std::size_t>(std::count(m.begin(), m.end(), 0u)) == best) expected.push_back(m);
  }
  EXPECT_EQ(models(g), expected);
  EXPECT_EQ(best, 2u);
}

TEST(ModelCount, Examples) {
  EXPECT_EQ(model_count(admissions_odd()), 6u);
  EXPECT_EQ(model_count(constant(binary_manager(3), false)), 0u);
}

TEST(Enumerate, Examples) {
  const auto ms = models(admissions_odd());
  std::vector<Instance> expected;
  for (const auto& row : testing::admissions_table()) {
    if (row.decision) expected.push_back(row.x);
  }
  EXPECT_EQ(ms, expected);
  EXPECT_EQ(models(constant(binary_manager(2), true)),
            (std::vector<Instance>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(Size, Examples) {
  auto mgr = binary_manager(2);
  EXPECT_EQ(size(constant(mgr, true)), 1u);
  EXPECT_EQ(size(literal(mgr, 0, 1)), 3u);
  // Frozen regression value for order (W, F, E, G).
  EXPECT_EQ(size(admissions_odd()), 8u);
}

// --- properties over random functions --------------------------------------

class RandomFunctions : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomFunctions, CanonicityAndAlgebra) {
  Rng rng(GetParam());
  const std::size_t n = 1 + GetParam() % 7;
  auto mgr = mixed_manager(rng, n, 3);
  const auto f = testing::random_function(mgr, rng);
  const auto g = testing::random_function(mgr, rng);
  const auto tf = testing::truth_table(f);
  const auto tg = testing::truth_table(g);
  const auto& vars = mgr->variables();

  // Canonicity: equal functions share roots.
  EXPECT_EQ(from_truth_table(mgr, tf), f);
  EXPECT_EQ(tf == tg, f == g);

  const auto nf = complement(f);
  EXPECT_EQ(complement(nf), f);
  EXPECT_EQ(model_count(f) + model_count(nf), vars.space_size());

  const auto fg_and = combine(f, g, BoolOp::conj);
  const auto fg_or = combine(f, g, BoolOp::disj);
  const auto fg_diff = combine(f, g, BoolOp::diff);
  for (std::uint64_t r = 0; r < vars.space_size(); ++r) {
    const auto x = instance_from_rank(vars, r);
    ASSERT_EQ(evaluate(nf, x), !tf[r]);
    ASSERT_EQ(evaluate(fg_and, x), tf[r] && tg[r]);
    ASSERT_EQ(evaluate(fg_or, x), tf[r] || tg[r]);
    ASSERT_EQ(evaluate(fg_diff, x), tf[r] && !tg[r]);
  }

  // Restrict.
  const auto var = GetParam() % n;
  const Value v = static_cast<Value>(GetParam() % vars.domain_size(var));
  const auto fr = restrict(f, var, v);
  for (std::uint64_t r = 0; r < vars.space_size(); ++r) {
    auto x = instance_from_rank(vars, r);
    const bool got = evaluate(fr, x);
    x[var] = v;
    ASSERT_EQ(got, evaluate(f, x));
  }

  // conjoin_assignment equals conjunction with literals.
  auto x = testing::random_instance(vars, rng);
  PartialInstance alpha(n);
  auto lits = constant(mgr, true);
  for (std::size_t i = 0; i < n; ++i) {
    if ((GetParam() >> i) & 1u) {
      alpha.set(i, x[i]);
      lits = combine(lits, literal(mgr, i, x[i]), BoolOp::conj);
    }
  }
  EXPECT_EQ(conjoin_assignment(f, alpha), combine(f, lits, BoolOp::conj));

  // Enumeration.
  const auto ms = models(f);
  EXPECT_EQ(ms.size(), model_count(f));
  EXPECT_TRUE(std::is_sorted(ms.begin(), ms.end()));
  EXPECT_EQ(std::set<Instance>(ms.begin(), ms.end()).size(), ms.size());
  for (const auto& m : ms) ASSERT_TRUE(evaluate(f, m));

  // Minimization against brute force.
  CostTable costs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < vars.domain_size(i); ++k) costs[i].push_back(static_cast<std::uint32_t>(rng() % 2));
  }
  auto cost = [&](const Instance& m) {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += costs[i][m[i]];
    return c;
  };
  const auto h = cardinality_minimize(f, costs);
  if (ms.empty()) {
    EXPECT_TRUE(h.is_false());
    EXPECT_FALSE(min_cost(f, costs).has_value());
  } else {
    std::uint64_t best = UINT64_MAX;
    for (const auto& m : ms) best = std::min(best, cost(m));
    std::vector<Instance> expected;
    for (const auto& m : ms) {
      if (cost(m) == best) expected.push_back(m);
    }
    EXPECT_EQ(models(h), expected);
    EXPECT_EQ(min_cost(f, costs), best);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomFunctions, ::testing::Range<std::uint64_t>(0, 60));

TEST(ModelCount, OverflowIsCapacityError) {
  std::vector<std::string> names;
  for (int i = 0; i < 64; ++i) names.push_back("X" + std::to_string(i));
  auto mgr = Manager::create(VariableTable::binary(names));
  expect_error(ErrorKind::capacity, [&] { model_count(constant(mgr, true)); });
  EXPECT_EQ(model_count(literal(mgr, 3, 1)), std::uint64_t{1} << 63);
}

TEST(CompleteMode, ComplementAndCount) {
  auto mgr = Manager::create(VariableTable::binary({"A", "B"}).with_dont_care(), DiagramMode::complete);
  const auto f = constant(mgr, false);
  const auto t = complement(f);
  EXPECT_EQ(model_count(t), 9u);
  EXPECT_EQ(models(t).size(), 9u);
  expect_error(ErrorKind::mode, [&] { restrict(t, 0, 0); });
}

}  // namespace
}  // namespace bnx
