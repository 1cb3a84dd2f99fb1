#include "locc/lp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "locc/counterexamples.hpp"
#include "locc/decide.hpp"
#include "locc/sampling.hpp"
#include "test_util.hpp"

using namespace locc;

namespace {

void expect_channel_satisfies(const FeasibilityProblem& prob, const DecisionReport& rep) {
  ASSERT_TRUE(rep.verdict);
  const auto& c = std::get<ConditionalChannel>(rep.certificate);
  for (const auto& ineq : evaluate_rows(prob, c)) EXPECT_TRUE(ineq.holds(1e-8)) << ineq.name;
}

}  // namespace

TEST(build_problem, layout_and_ordering) {
  const auto prob = build_problem({0.5, 0.5}, {SchmidtVector({0.5, 0.5}), SchmidtVector({0.8, 0.2})},
                                  {0.3, 0.3, 0.4},
                                  {SchmidtVector({0.9, 0.1}), SchmidtVector({0.6, 0.4}), SchmidtVector({1.0, 0.0})});
  EXPECT_EQ(prob.variables(), 6u);
  EXPECT_EQ(prob.index(1, 2), 5u);
  // 2 stochastic + 3 mixture + 2 branches x (d - 1) tail rows.
  ASSERT_EQ(prob.rows.size(), 7u);
  EXPECT_EQ(prob.rows[0].label, "stochastic[0]");
  EXPECT_EQ(prob.rows[2].label, "mixture[0]");
  EXPECT_EQ(prob.rows[6].label, "branch[1].E_1");
  EXPECT_EQ(prob.rows[6].coeffs, (std::vector<double>{0, 0, 0, 0.1, 0.4, 0.0}));
  EXPECT_DOUBLE_EQ(prob.rows[6].rhs, 0.2);
  EXPECT_EQ(prob.rows[3].coeffs, (std::vector<double>{0, 0.5, 0, 0, 0.5, 0}));
}

TEST(build_problem, single_branch_matches_pure_to_ensemble) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 500; ++t) {
    const auto psi = random_schmidt(3, rng);
    const auto w = sample_simplex(3, rng);
    std::vector<SchmidtVector> targets{random_schmidt(3, rng), random_schmidt(3, rng), random_schmidt(3, rng)};
    const auto lp = lp_feasible(build_problem({1.0}, {psi}, w, targets));
    const auto jp = pure_to_ensemble_convertible(psi, w, targets);
    if (std::abs(jp.min_margin()) < 1e-7) continue;
    EXPECT_EQ(lp.verdict, jp.verdict);
  }
}

TEST(lp_feasible, identity_channel) {
  const std::vector<SchmidtVector> states{SchmidtVector({0.5, 0.5}), SchmidtVector({0.9, 0.1})};
  const auto prob = build_problem({0.4, 0.6}, states, {0.4, 0.6}, states);
  const auto rep = lp_feasible(prob);
  expect_channel_satisfies(prob, rep);
  const auto& c = std::get<ConditionalChannel>(rep.certificate);
  // Branch 2 (less entangled) can only keep its own state.
  EXPECT_NEAR(c(1, 1), 1.0, 1e-9);
  EXPECT_NEAR(c(0, 0), 1.0, 1e-9);
}

TEST(lp_feasible, bell_source_reaches_any_two_qubit_distribution) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const auto q = sample_simplex(3, rng);
    const auto prob = build_problem({1.0}, {SchmidtVector({0.5, 0.5})}, q,
                                    {random_schmidt(2, rng), random_schmidt(2, rng), random_schmidt(2, rng)});
    expect_channel_satisfies(prob, lp_feasible(prob));
  }
}

TEST(lp_feasible, prop1_instances_are_infeasible) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 200; ++t) {
    const auto inst = gen_prop1_instance(random_profile_set(rng));
    const auto prob = prop1_problem(inst);
    const auto rep = lp_feasible(prob);
    ASSERT_FALSE(rep.verdict);
    EXPECT_TRUE(farkas_certifies(prob, std::get<FarkasWitness>(rep.certificate)));
  }
}

TEST(lp_feasible, single_pair_equals_nielsen) {
  std::mt19937_64 rng(12);
  int mismatches = 0, compared = 0;
  for (int t = 0; t < 100000; ++t) {
    const std::size_t d = 2 + t % 3;
    const auto a = random_schmidt(d, rng);
    const auto b = random_schmidt(d, rng);
    const auto ni = nielsen_convertible(a, b);
    const auto lp = lp_feasible(build_problem({1.0}, {a}, {1.0}, {b}));
    ++compared;
    if (ni.verdict != lp.verdict) ++mismatches;
  }
  EXPECT_EQ(compared, 100000);
  EXPECT_EQ(mismatches, 0);
}

TEST(lp_feasible, label_invariance) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 500; ++t) {
    const auto p = sample_simplex(3, rng);
    const auto q = sample_simplex(2, rng);
    std::vector<SchmidtVector> src{random_schmidt(3, rng), random_schmidt(3, rng), random_schmidt(3, rng)};
    std::vector<SchmidtVector> dst{random_schmidt(3, rng), random_schmidt(3, rng)};
    const auto base = lp_feasible(build_problem(p, src, q, dst));
    std::vector<std::size_t> perm{2, 0, 1};
    std::vector<double> pp;
    std::vector<SchmidtVector> ps;
    for (auto i : perm) {
      pp.push_back(p[i]);
      ps.push_back(src[i]);
    }
    const auto permuted = lp_feasible(build_problem(pp, ps, {q[1], q[0]}, {dst[1], dst[0]}));
    EXPECT_EQ(base.verdict, permuted.verdict);
  }
}

TEST(lp_feasible, farkas_witness_certifies_and_is_exact) {
  const auto prob = build_problem({0.5, 0.5}, {SchmidtVector({0.5, 0.5}), SchmidtVector({0.8, 0.2})},
                                  {0.7, 0.3}, {SchmidtVector({0.6, 0.4}), SchmidtVector({0.9, 0.1})});
  const auto rep = lp_feasible(prob);
  ASSERT_FALSE(rep.verdict);
  const auto& w = std::get<FarkasWitness>(rep.certificate);
  EXPECT_TRUE(farkas_certifies(prob, w));
  EXPECT_GT(w.combined_rhs, 0.0);
  FarkasWitness flipped = w;
  for (double& y : flipped.multipliers) y = -y;
  EXPECT_FALSE(farkas_certifies(prob, flipped));
}

TEST(lp_feasible, zero_rows_are_trivial) {
  // Product targets make every tail row identically zero.
  const auto prob = build_problem({1.0}, {SchmidtVector({0.9, 0.1})}, {0.5, 0.5},
                                  {SchmidtVector({1.0, 0.0}), SchmidtVector({1.0, 0.0})});
  expect_channel_satisfies(prob, lp_feasible(prob));
}

TEST(lp_feasible, conditioning_error_names_row) {
  FeasibilityProblem prob;
  prob.n1 = 1;
  prob.n2 = 1;
  prob.p = {1.0};
  prob.q = {1.0};
  prob.rows.push_back({"stochastic[0]", RowKind::kEquality, {1.0}, 1.0});
  prob.rows.push_back({"tiny", RowKind::kUpperBound, {1e-11}, 0.5});
  try {
    lp_feasible(prob);
    FAIL() << "expected ConditioningError";
  } catch (const ConditioningError& e) {
    EXPECT_NE(std::string(e.what()).find("tiny"), std::string::npos);
  }
}

TEST(lp_feasible, deterministic) {
  const auto prob = build_problem({0.3, 0.7}, {SchmidtVector({0.5, 0.5}), SchmidtVector({0.7, 0.3})},
                                  {0.5, 0.5}, {SchmidtVector({0.6, 0.4}), SchmidtVector({0.8, 0.2})});
  const auto a = lp_feasible(prob);
  const auto b = lp_feasible(prob);
  ASSERT_EQ(a.verdict, b.verdict);
  if (a.verdict) {
    EXPECT_EQ(std::get<ConditionalChannel>(a.certificate).rows(), std::get<ConditionalChannel>(b.certificate).rows());
  }
}

TEST(lp_feasible, agrees_with_closed_form) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 2000; ++t) {
    const auto inst = random_two_qubit_instance(rng);
    const auto cf = dist_convert_closed_form(inst);
    if (std::abs(cf.min_margin()) < 1e-7) continue;
    const auto prob = build_problem(inst.source_probs(), inst.source_schmidt(), inst.target_probs(),
                                    inst.target_schmidt());
    const auto lp = lp_feasible(prob);
    EXPECT_EQ(cf.verdict, lp.verdict);
    if (lp.verdict) {
      expect_channel_satisfies(prob, lp);
    } else {
      EXPECT_TRUE(farkas_certifies(prob, std::get<FarkasWitness>(lp.certificate)));
    }
  }
}
