#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "locc/errors.hpp"
#include "locc/monotones.hpp"
#include "locc/report.hpp"
#include "locc/states.hpp"
#include "locc/tolerance.hpp"

namespace locc {

/// psi -> phi by LOCC iff E_k(psi) >= E_k(phi) for all k (zero-padded).
inline DecisionReport nielsen_convertible(const SchmidtVector& psi, const SchmidtVector& phi,
                                          const Tolerances& tol = kDefaultTolerances) {
  const std::size_t d = std::max(psi.size(), phi.size());
  const SchmidtVector a = psi.padded(d);
  const SchmidtVector b = phi.padded(d);
  DecisionReport rep;
  rep.method = "nielsen";
  std::optional<Inequality> violated;
  for (std::size_t k = 0; k < d; ++k) {
    Inequality ineq{"tail_sum", k, {}, e_k(a, k).value(), e_k(b, k).value()};
    if (!violated && !ineq.holds(tol.decision)) violated = ineq;
    rep.margins.push_back(ineq);
  }
  rep.verdict = !violated;
  if (violated) {
    rep.certificate = ViolationWitness{*violated};
  } else {
    rep.certificate = ConditionalChannel(std::vector<std::vector<double>>{{1.0}});
  }
  return rep;
}

/// psi -> {q_j, phi_j} by LOCC iff E_k(psi) >= sum_j q_j E_k(phi_j) for all k.
inline DecisionReport pure_to_ensemble_convertible(const SchmidtVector& psi,
                                                   const std::vector<double>& q,
                                                   const std::vector<SchmidtVector>& targets,
                                                   const Tolerances& tol = kDefaultTolerances) {
  if (q.size() != targets.size() || q.empty()) {
    throw ValidationError("pure_to_ensemble_convertible: probability/state count mismatch");
  }
  std::size_t d = psi.size();
  for (const auto& t : targets) d = std::max(d, t.size());
  const SchmidtVector a = psi.padded(d);
  std::vector<SchmidtVector> bs;
  for (const auto& t : targets) bs.push_back(t.padded(d));

  DecisionReport rep;
  rep.method = "pure-to-ensemble";
  std::optional<Inequality> violated;
  for (std::size_t k = 0; k < d; ++k) {
    double avg = 0.0;
    for (std::size_t j = 0; j < bs.size(); ++j) avg += q[j] * e_k(bs[j], k).value();
    Inequality ineq{"ensemble_tail_sum", k, {}, e_k(a, k).value(), avg};
    if (!violated && !ineq.holds(tol.decision)) violated = ineq;
    rep.margins.push_back(ineq);
  }
  rep.verdict = !violated;
  if (violated) {
    rep.certificate = ViolationWitness{*violated};
  } else {
    rep.certificate = ConditionalChannel(std::vector<std::vector<double>>{q});
  }
  return rep;
}

inline DecisionReport pure_to_ensemble_convertible(const SchmidtVector& psi, const Ensemble& d,
                                                   const Tolerances& tol = kDefaultTolerances) {
  std::vector<double> q;
  std::vector<SchmidtVector> targets;
  for (const auto& e : d) {
    q.push_back(e.prob);
    targets.push_back(schmidt_decompose(e.state));
  }
  return pure_to_ensemble_convertible(psi, q, targets, tol);
}

/// Two two-qubit pure states with probabilities (p1, p2) transformed into
/// two with (q1, q2); states enter only through their x-parameters.
/// Canonical order x1 >= x2, y1 >= y2 is established on construction.
class TwoQubitDistInstance {
 public:
  TwoQubitDistInstance(double p1, double x1, double p2, double x2, double q1, double y1,
                       double q2, double y2, double tol = kDefaultTolerances.normalization) {
    auto check_prob = [](double v, const char* name) {
      if (!(v > 0.0 && v < 1.0)) {
        throw ValidationError(std::string("TwoQubitDistInstance: ") + name +
                              " must lie in (0,1), got " + std::to_string(v));
      }
    };
    auto check_x = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError(std::string("TwoQubitDistInstance: ") + name +
                              " must lie in [0,1], got " + std::to_string(v));
      }
    };
    check_prob(p1, "p1");
    check_prob(p2, "p2");
    check_prob(q1, "q1");
    check_prob(q2, "q2");
    check_x(x1, "x1");
    check_x(x2, "x2");
    check_x(y1, "y1");
    check_x(y2, "y2");
    if (std::abs(p1 + p2 - 1.0) > tol || std::abs(q1 + q2 - 1.0) > tol) {
      throw ValidationError("TwoQubitDistInstance: probabilities do not sum to 1");
    }
    if (x1 < x2) {
      std::swap(x1, x2);
      std::swap(p1, p2);
    }
    if (y1 < y2) {
      std::swap(y1, y2);
      std::swap(q1, q2);
    }
    p1_ = p1;
    p2_ = p2;
    x1_ = x1;
    x2_ = x2;
    q1_ = q1;
    q2_ = q2;
    y1_ = y1;
    y2_ = y2;
  }

  /// Both ensembles must hold exactly two 2x2 states.
  static TwoQubitDistInstance from_ensembles(const Ensemble& d1, const Ensemble& d2) {
    if (d1.size() != 2 || d2.size() != 2) {
      throw DimensionError("TwoQubitDistInstance: both distributions need exactly two states");
    }
    if (d1.dim() != 2 || d2.dim() != 2) {
      throw DimensionError("TwoQubitDistInstance: states must be 2x2");
    }
    return TwoQubitDistInstance(d1[0].prob, x_param(d1[0].state), d1[1].prob,
                                x_param(d1[1].state), d2[0].prob, x_param(d2[0].state),
                                d2[1].prob, x_param(d2[1].state));
  }

  double p1() const { return p1_; }
  double p2() const { return p2_; }
  double x1() const { return x1_; }
  double x2() const { return x2_; }
  double q1() const { return q1_; }
  double q2() const { return q2_; }
  double y1() const { return y1_; }
  double y2() const { return y2_; }

  std::vector<double> source_probs() const { return {p1_, p2_}; }
  std::vector<double> target_probs() const { return {q1_, q2_}; }
  std::vector<SchmidtVector> source_schmidt() const {
    return {SchmidtVector({1.0 - x1_ / 2, x1_ / 2}), SchmidtVector({1.0 - x2_ / 2, x2_ / 2})};
  }
  std::vector<SchmidtVector> target_schmidt() const {
    return {SchmidtVector({1.0 - y1_ / 2, y1_ / 2}), SchmidtVector({1.0 - y2_ / 2, y2_ / 2})};
  }

 private:
  double p1_, p2_, x1_, x2_, q1_, q2_, y1_, y2_;
};

/// Largest q_{1|i} branch i can afford: min(1, (x_i - y2) / (y1 - y2)).
inline double max_branch_weight(double x, double y1, double y2) {
  return std::clamp((x - y2) / (y1 - y2), 0.0, 1.0);
}

/// Closed-form decision for two-state to two-state two-qubit distributions.
inline DecisionReport dist_convert_closed_form(const TwoQubitDistInstance& inst,
                                               const Tolerances& tol = kDefaultTolerances) {
  const double p1 = inst.p1(), p2 = inst.p2(), q1 = inst.q1();
  const double x1 = inst.x1(), x2 = inst.x2(), y1 = inst.y1(), y2 = inst.y2();
  DecisionReport rep;
  rep.method = "closed-form";

  const Inequality branch2{"branch2_x_vs_y2", {}, {}, x2, y2};
  rep.margins.push_back(branch2);
  if (!branch2.holds(tol.decision)) {
    rep.verdict = false;
    rep.certificate = ViolationWitness{branch2};
    return rep;
  }
  if (std::abs(y1 - y2) <= tol.decision) {
    // Every branch reaches both targets; any mixture-matching channel works.
    rep.verdict = true;
    rep.certificate = ConditionalChannel(std::vector<std::vector<double>>{{q1, 1.0 - q1}, {q1, 1.0 - q1}});
    return rep;
  }
  const double m1 = max_branch_weight(x1, y1, y2);
  const double m2 = max_branch_weight(x2, y1, y2);
  const Inequality capacity{"mixture_capacity", {}, {}, p1 * m1 + p2 * m2, q1};
  rep.margins.push_back(capacity);
  if (!capacity.holds(tol.decision)) {
    rep.verdict = false;
    rep.certificate = ViolationWitness{capacity};
    return rep;
  }
  // Saturate branch 2 first, then solve the mixture equation for branch 1.
  const double q12 = std::min(m2, std::max(0.0, (q1 - p1 * m1) / p2));
  const double q11 = std::clamp((q1 - p2 * q12) / p1, 0.0, m1);
  rep.verdict = true;
  rep.certificate = ConditionalChannel(std::vector<std::vector<double>>{{q11, 1.0 - q11}, {q12, 1.0 - q12}});
  return rep;
}

/// {0, y2, y1, 1}, deduplicated and ascending.
inline std::vector<double> critical_mu_set(const TwoQubitDistInstance& inst) {
  std::vector<double> mus{0.0, inst.y2(), inst.y1(), 1.0};
  std::sort(mus.begin(), mus.end());
  mus.erase(std::unique(mus.begin(), mus.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-15; }),
            mus.end());
  return mus;
}

/// Checks sum_i p_i f_mu(x_i) >= sum_j q_j f_mu(y_j) at every supplied mu.
inline DecisionReport dist_convert_mu(const TwoQubitDistInstance& inst,
                                      const std::vector<double>& mus,
                                      const Tolerances& tol = kDefaultTolerances,
                                      std::string method = "mu") {
  DecisionReport rep;
  rep.method = std::move(method);
  std::optional<Inequality> violated;
  MarginTable table;
  for (double mu : mus) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("dist_convert_mu: mu outside [0,1]");
    const double lhs = inst.p1() * f_mu(inst.x1(), mu) + inst.p2() * f_mu(inst.x2(), mu);
    const double rhs = inst.q1() * f_mu(inst.y1(), mu) + inst.q2() * f_mu(inst.y2(), mu);
    Inequality ineq{"f_mu", {}, mu, lhs, rhs};
    if (!violated && !ineq.holds(tol.decision)) violated = ineq;
    table.rows.push_back(ineq);
  }
  rep.margins = table.rows;
  rep.verdict = !violated;
  if (violated) {
    rep.certificate = ViolationWitness{*violated};
  } else {
    rep.certificate = std::move(table);
  }
  return rep;
}

/// Farey sequence: every a/b in [0,1] with b <= bound, ascending.
inline std::vector<double> rational_mu_grid(int denominator_bound) {
  if (denominator_bound < 1) throw DomainError("rational_mu_grid: bound must be >= 1");
  std::vector<double> out;
  long a = 0, b = 1, c = 1, d = denominator_bound;
  out.push_back(0.0);
  while (c <= denominator_bound) {
    const long k = (denominator_bound + b) / d;
    const long na = c, nb = d, nc = k * c - a, nd = k * d - b;
    a = na;
    b = nb;
    c = nc;
    d = nd;
    out.push_back(static_cast<double>(a) / static_cast<double>(b));
    if (a == b) break;
  }
  return out;
}

/// n + 1 uniform points on [0, 1].
inline std::vector<double> uniform_mu_grid(int n) {
  if (n < 1) throw DomainError("uniform_mu_grid: n must be >= 1");
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) / n);
  return g;
}

}  // namespace locc
