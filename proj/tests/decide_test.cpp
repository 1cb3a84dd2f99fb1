#include "locc/decide.hpp"

#include <gtest/gtest.h>

#include <random>

#include "locc/audit.hpp"
#include "locc/sampling.hpp"
#include "test_util.hpp"

using namespace locc;

namespace {

// Brute-force conditional-channel search: scan q_{1|2} finely, solve the
// mixture equation for q_{1|1} and test both branch conditions.
bool channel_scan_oracle(double p1, double x1, double x2, double q1, double y1, double y2) {
  const double p2 = 1.0 - p1;
  constexpr int kSteps = 200000;
  for (int s = 0; s <= kSteps; ++s) {
    const double q12 = static_cast<double>(s) / kSteps;
    const double q11 = (q1 - p2 * q12) / p1;
    if (q11 < -1e-12 || q11 > 1.0 + 1e-12) continue;
    if (x1 >= q11 * y1 + (1 - q11) * y2 - 1e-12 && x2 >= q12 * y1 + (1 - q12) * y2 - 1e-12) return true;
  }
  return false;
}

audit::RawInstance raw_of(const TwoQubitDistInstance& inst) {
  audit::RawInstance r;
  r.p = inst.source_probs();
  r.q = inst.target_probs();
  for (const auto& s : inst.source_schmidt()) r.sources.push_back(s.values());
  for (const auto& s : inst.target_schmidt()) r.targets.push_back(s.values());
  return r;
}

}  // namespace

TEST(nielsen, examples) {
  EXPECT_TRUE(nielsen_convertible(SchmidtVector({0.5, 0.5}), SchmidtVector({0.7, 0.3})).verdict);

  const auto down = nielsen_convertible(SchmidtVector({0.7, 0.3}), SchmidtVector({0.5, 0.5}));
  ASSERT_FALSE(down.verdict);
  const auto& w = std::get<ViolationWitness>(down.certificate).inequality;
  EXPECT_EQ(*w.k, 1u);
  EXPECT_NEAR(w.lhs, 0.3, 1e-15);
  EXPECT_NEAR(w.rhs, 0.5, 1e-15);

  const SchmidtVector a({0.4, 0.3, 0.2, 0.1});
  const SchmidtVector b({0.5, 0.25, 0.2, 0.05});
  EXPECT_TRUE(oracle::majorization_oracle(a.values(), b.values(), 1e-9));
  const auto rep = nielsen_convertible(a, b);
  EXPECT_TRUE(rep.verdict);
  ASSERT_EQ(rep.margins.size(), 4u);
  EXPECT_NEAR(rep.margins[1].lhs, 0.6, 1e-15);
  EXPECT_NEAR(rep.margins[1].rhs, 0.5, 1e-15);
  EXPECT_NEAR(rep.margins[2].lhs, 0.3, 1e-15);
  EXPECT_NEAR(rep.margins[2].rhs, 0.25, 1e-15);
  EXPECT_NEAR(rep.margins[3].lhs, 0.1, 1e-15);
  EXPECT_NEAR(rep.margins[3].rhs, 0.05, 1e-15);
}

TEST(nielsen, pads_unequal_dimensions) {
  EXPECT_TRUE(nielsen_convertible(SchmidtVector({0.4, 0.3, 0.3}), SchmidtVector({0.5, 0.5})).verdict);
  EXPECT_FALSE(nielsen_convertible(SchmidtVector({0.5, 0.5}), SchmidtVector({0.4, 0.3, 0.3})).verdict);
}

TEST(nielsen, matches_oracle_reflexive_and_transitive) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10000; ++t) {
    const auto a = random_schmidt(4, rng);
    const auto b = random_schmidt(4, rng);
    const auto c = random_schmidt(4, rng);
    EXPECT_TRUE(nielsen_convertible(a, a).verdict);
    const bool ab = nielsen_convertible(a, b).verdict;
    const bool bc = nielsen_convertible(b, c).verdict;
    EXPECT_EQ(ab, oracle::majorization_oracle(a.values(), b.values(), 1e-9));
    if (ab && bc) {
      EXPECT_TRUE(nielsen_convertible(a, c).verdict);
    }
  }
}

TEST(pure_to_ensemble, examples) {
  const SchmidtVector phi({0.7, 0.3});
  const SchmidtVector psi({0.6, 0.4});
  EXPECT_EQ(pure_to_ensemble_convertible(psi, {1.0}, {phi}).verdict,
            nielsen_convertible(psi, phi).verdict);

  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const double q = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    EXPECT_TRUE(pure_to_ensemble_convertible(SchmidtVector({0.5, 0.5}), {q, 1 - q},
                                             {random_schmidt(2, rng), random_schmidt(2, rng)})
                    .verdict);
  }

  const auto rep = pure_to_ensemble_convertible(SchmidtVector({0.7, 0.3}), {0.5, 0.5},
                                                {SchmidtVector({0.5, 0.5}), SchmidtVector({1.0, 0.0})});
  EXPECT_TRUE(rep.verdict);
  EXPECT_NEAR(rep.margins[1].lhs, 0.3, 1e-15);
  EXPECT_NEAR(rep.margins[1].rhs, 0.25, 1e-15);
}

TEST(two_qubit_instance, canonical_order) {
  const TwoQubitDistInstance inst(0.3, 0.2, 0.7, 0.9, 0.4, 0.1, 0.6, 0.5);
  EXPECT_DOUBLE_EQ(inst.x1(), 0.9);
  EXPECT_DOUBLE_EQ(inst.p1(), 0.7);
  EXPECT_DOUBLE_EQ(inst.y1(), 0.5);
  EXPECT_DOUBLE_EQ(inst.q1(), 0.6);
  EXPECT_THROW(TwoQubitDistInstance(0.3, 0.2, 0.6, 0.9, 0.4, 0.1, 0.6, 0.5), ValidationError);
  EXPECT_THROW(TwoQubitDistInstance(0.3, 1.2, 0.7, 0.9, 0.4, 0.1, 0.6, 0.5), ValidationError);
}

TEST(closed_form, infeasible_capacity) {
  const TwoQubitDistInstance inst(0.5, 1.0, 0.5, 0.4, 0.7, 0.8, 0.3, 0.2);
  EXPECT_FALSE(channel_scan_oracle(0.5, 1.0, 0.4, 0.7, 0.8, 0.2));
  const auto rep = dist_convert_closed_form(inst);
  ASSERT_FALSE(rep.verdict);
  const auto& w = std::get<ViolationWitness>(rep.certificate).inequality;
  EXPECT_EQ(w.name, "mixture_capacity");
  EXPECT_NEAR(w.lhs, 0.5 + 0.5 / 3.0, 1e-12);
  EXPECT_NEAR(w.rhs, 0.7, 1e-15);
}

TEST(closed_form, feasible_with_certificate) {
  const TwoQubitDistInstance inst(0.5, 1.0, 0.5, 0.4, 0.6, 0.8, 0.4, 0.2);
  EXPECT_TRUE(channel_scan_oracle(0.5, 1.0, 0.4, 0.6, 0.8, 0.2));
  const auto rep = dist_convert_closed_form(inst);
  ASSERT_TRUE(rep.verdict);
  const auto& c = std::get<ConditionalChannel>(rep.certificate);
  EXPECT_NEAR(0.5 * c(0, 0) + 0.5 * c(1, 0), 0.6, 1e-12);
  EXPECT_GE(1.0, c(0, 0) * 0.8 + c(0, 1) * 0.2 - 1e-12);
  EXPECT_GE(0.4, c(1, 0) * 0.8 + c(1, 1) * 0.2 - 1e-12);
  // Branch 1 at full capacity, branch 2 covers the rest: q_{1|2} = (q1 - p1) / p2.
  EXPECT_NEAR(c(1, 0), 0.2, 1e-12);
  EXPECT_TRUE(audit::audit_report(rep, raw_of(inst)).ok);
}

TEST(closed_form, case_b_inequality) {
  const TwoQubitDistInstance inst(0.5, 0.9, 0.5, 0.4, 0.7, 0.8, 0.3, 0.2);
  EXPECT_FALSE(channel_scan_oracle(0.5, 0.9, 0.4, 0.7, 0.8, 0.2));
  EXPECT_FALSE(dist_convert_closed_form(inst).verdict);
  // p1 y1 + p2 x2 = 0.6 < q1 y1 + q2 y2 = 0.62
  EXPECT_NEAR(0.5 * 0.8 + 0.5 * 0.4, 0.6, 1e-15);
  EXPECT_NEAR(0.7 * 0.8 + 0.3 * 0.2, 0.62, 1e-15);
}

TEST(closed_form, branch_two_below_target) {
  const TwoQubitDistInstance inst(0.5, 0.9, 0.5, 0.1, 0.5, 0.8, 0.5, 0.2);
  const auto rep = dist_convert_closed_form(inst);
  ASSERT_FALSE(rep.verdict);
  EXPECT_EQ(std::get<ViolationWitness>(rep.certificate).inequality.name, "branch2_x_vs_y2");
  EXPECT_TRUE(audit::audit_report(rep, raw_of(inst)).ok);
}

TEST(closed_form, degenerate_equal_targets) {
  EXPECT_TRUE(dist_convert_closed_form(TwoQubitDistInstance(0.4, 0.9, 0.6, 0.5, 0.3, 0.5, 0.7, 0.5)).verdict);
  EXPECT_FALSE(dist_convert_closed_form(TwoQubitDistInstance(0.4, 0.9, 0.6, 0.4, 0.3, 0.5, 0.7, 0.5)).verdict);
  // Boundary x2 = y2 decides as convertible.
  EXPECT_TRUE(dist_convert_closed_form(TwoQubitDistInstance(0.4, 0.9, 0.6, 0.5, 0.3, 0.8, 0.7, 0.5)).verdict ==
              channel_scan_oracle(0.4, 0.9, 0.5, 0.3, 0.8, 0.5));
}

TEST(closed_form, agrees_with_channel_scan) {
  std::mt19937_64 rng(8);
  int disagreements = 0;
  for (int t = 0; t < 300; ++t) {
    const auto inst = random_two_qubit_instance(rng);
    const auto rep = dist_convert_closed_form(inst);
    if (std::abs(rep.min_margin()) < 1e-4) continue;  // scan resolution
    const bool oracle = channel_scan_oracle(inst.p1(), inst.x1(), inst.x2(), inst.q1(), inst.y1(), inst.y2());
    if (oracle != rep.verdict) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(critical_mu_set, examples) {
  auto inst = [](double y1, double y2) { return TwoQubitDistInstance(0.5, 0.9, 0.5, 0.5, 0.5, y1, 0.5, y2); };
  EXPECT_EQ(critical_mu_set(inst(0.8, 0.2)), (std::vector<double>{0.0, 0.2, 0.8, 1.0}));
  EXPECT_EQ(critical_mu_set(inst(0.5, 0.5)), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(critical_mu_set(inst(1.0, 0.0)), (std::vector<double>{0.0, 1.0}));
}

TEST(dist_convert_mu, identity_transformation) {
  const TwoQubitDistInstance inst(0.3, 0.6, 0.7, 0.6, 0.3, 0.6, 0.7, 0.6);
  EXPECT_TRUE(dist_convert_mu(inst, uniform_mu_grid(1000)).verdict);
}

TEST(dist_convert_mu, dense_grid_violation) {
  const TwoQubitDistInstance inst(0.5, 1.0, 0.5, 0.4, 0.7, 0.8, 0.3, 0.2);
  const auto rep = dist_convert_mu(inst, uniform_mu_grid(10000));
  ASSERT_FALSE(rep.verdict);
  const double mu = *std::get<ViolationWitness>(rep.certificate).inequality.mu;
  EXPECT_GT(mu, 0.2);
  EXPECT_LE(mu, 0.8);
  EXPECT_EQ(dist_convert_closed_form(inst).verdict, rep.verdict);
}

TEST(dist_convert_mu, critical_set_violation) {
  const TwoQubitDistInstance inst(0.5, 1.0, 0.5, 0.4, 0.7, 0.8, 0.3, 0.2);
  const auto rep = dist_convert_mu(inst, critical_mu_set(inst));
  ASSERT_FALSE(rep.verdict);
  const auto& w = std::get<ViolationWitness>(rep.certificate).inequality;
  EXPECT_TRUE(*w.mu == 0.8 || *w.mu == 1.0);
  // At mu = 0.8: 0.5 * 1 + 0.5 * 0.5 = 0.75 < 0.7 * 1 + 0.3 * 0.25 = 0.775.
  EXPECT_NEAR(w.lhs, 0.75, 1e-15);
  EXPECT_NEAR(w.rhs, 0.775, 1e-15);
  EXPECT_TRUE(audit::audit_report(rep, raw_of(inst)).ok);
}

TEST(dist_convert_mu, positive_certificate_is_margin_table) {
  const TwoQubitDistInstance inst(0.5, 1.0, 0.5, 0.4, 0.6, 0.8, 0.4, 0.2);
  const auto rep = dist_convert_mu(inst, critical_mu_set(inst));
  ASSERT_TRUE(rep.verdict);
  EXPECT_EQ(std::get<MarginTable>(rep.certificate).rows.size(), 4u);
  EXPECT_TRUE(audit::audit_report(rep, raw_of(inst)).ok);
  EXPECT_THROW(dist_convert_mu(inst, {1.5}), DomainError);
}

TEST(dist_convert_mu, dense_grid_consistent_with_critical_set) {
  std::mt19937_64 rng(21);
  const auto grid = uniform_mu_grid(10000);
  int boundary = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto inst = random_two_qubit_instance(rng);
    const auto crit = dist_convert_mu(inst, critical_mu_set(inst));
    const auto dense = dist_convert_mu(inst, grid);
    if (crit.verdict == dense.verdict) continue;
    // The dense grid is within the full interval, so it can only miss a violation.
    EXPECT_TRUE(dense.verdict);
    ++boundary;
  }
  RecordProperty("boundary_cases", boundary);
  EXPECT_LT(boundary, 20);
}

TEST(rational_mu_grid, farey_sequences) {
  EXPECT_EQ(rational_mu_grid(1), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(rational_mu_grid(2), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(rational_mu_grid(4), (std::vector<double>{0.0, 0.25, 1.0 / 3, 0.5, 2.0 / 3, 0.75, 1.0}));
  // |F_n| = 1 + sum_{k<=n} phi(k); |F_50| = 775.
  EXPECT_EQ(rational_mu_grid(50).size(), 775u);
  EXPECT_THROW(rational_mu_grid(0), DomainError);
}
