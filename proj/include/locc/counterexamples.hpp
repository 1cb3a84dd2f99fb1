#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "locc/decide.hpp"
#include "locc/errors.hpp"
#include "locc/lp.hpp"
#include "locc/monotones.hpp"
#include "locc/report.hpp"
#include "locc/states.hpp"

namespace locc {

/// Outcome of checking a counterexample: every inequality in `conditions`
/// must hold while every entry of `witnesses` must be violated.
struct CertificationReport {
  bool certified = false;
  std::string kind;
  std::vector<Inequality> conditions;
  std::vector<Inequality> witnesses;
  // Why certification failed; empty when certified.
  std::string failure;
};

// ---------------------------------------------------------------------------
// Two-qubit distributions D1 = {(p1, x1), (1 - p1, x2)} -> D2 = {(1, y)} on
// which every profile of a finite set is non-decreasing, yet no LOCC
// protocol succeeds.

struct Prop1Instance {
  double p1 = 0.5;
  double x1 = 1.0;
  double x2 = 0.0;
  double y = 0.0;
  std::vector<MonotoneProfile> monotone_set;

  double p2() const { return 1.0 - p1; }
};

/// Halves y until every non-Schmidt profile is below 1 - tol at y, then
/// takes p1 = max(max_k f_k(y), 1/2), x1 = 1, x2 = y / 2.
inline Prop1Instance gen_prop1_instance(const std::vector<MonotoneProfile>& monotone_set,
                                        double tol = kDefaultTolerances.decision) {
  if (monotone_set.empty()) throw PreconditionError("gen_prop1_instance: empty monotone set");
  std::vector<const MonotoneProfile*> anchors;
  for (const auto& f : monotone_set)
    if (!f.is_schmidt_like) anchors.push_back(&f);
  if (anchors.empty()) {
    throw PreconditionError(
        "gen_prop1_instance: set contains only Schmidt-like profiles; no profile drops below 1");
  }
  constexpr int kMaxHalvings = 60;
  double y = 1.0;
  double worst = 1.0;
  const MonotoneProfile* blocker = anchors.front();
  for (int t = 1; t <= kMaxHalvings; ++t) {
    y = std::ldexp(1.0, -t);
    worst = -1.0;
    for (const auto* f : anchors) {
      const double v = (*f)(y);
      if (v > worst) {
        worst = v;
        blocker = f;
      }
    }
    if (worst < 1.0 - tol) break;
  }
  if (!(worst < 1.0 - tol)) {
    throw PreconditionError("gen_prop1_instance: profile '" + blocker->label +
                            "' never drops below 1 on y = 2^-t, t <= 60");
  }
  Prop1Instance inst;
  inst.p1 = std::max(worst, 0.5);
  inst.x1 = 1.0;
  inst.x2 = y / 2.0;
  inst.y = y;
  inst.monotone_set = monotone_set;
  return inst;
}

/// The LP oracle's view of a Prop1Instance.
inline FeasibilityProblem prop1_problem(const Prop1Instance& inst) {
  auto sv = [](double x) { return SchmidtVector({1.0 - x / 2.0, x / 2.0}); };
  return build_problem({inst.p1, inst.p2()}, {sv(inst.x1), sv(inst.x2)}, {1.0}, {sv(inst.y)});
}

inline CertificationReport verify_prop1(const Prop1Instance& inst,
                                        const Tolerances& tol = kDefaultTolerances) {
  CertificationReport rep;
  rep.kind = "prop1";
  auto fail = [&](std::string why) {
    rep.certified = false;
    rep.failure = std::move(why);
    return rep;
  };
  if (!(inst.p1 > 0.0 && inst.p1 < 1.0)) return fail("p1 outside (0,1)");
  for (double v : {inst.x1, inst.x2, inst.y})
    if (!(v >= 0.0 && v <= 1.0)) return fail("x-parameter outside [0,1]");

  for (const auto& f : inst.monotone_set) {
    Inequality ineq{f.label, {}, {}, inst.p1 * f(inst.x1) + inst.p2() * f(inst.x2), f(inst.y)};
    rep.conditions.push_back(ineq);
  }
  for (const auto& c : rep.conditions) {
    if (!c.holds(tol.decision)) return fail("monotone inequality fails for " + c.name);
  }

  // Branch 2 cannot reach the target: Nielsen on (x2 -> y).
  const auto branch = nielsen_convertible(SchmidtVector({1.0 - inst.x2 / 2, inst.x2 / 2}),
                                          SchmidtVector({1.0 - inst.y / 2, inst.y / 2}), tol);
  const Inequality branch_x{"branch2_x_vs_y", {}, {}, inst.x2, inst.y};
  rep.witnesses.push_back(branch_x);
  if (branch.verdict || branch_x.holds(tol.decision)) {
    return fail("branch 2 converts (x2 >= y); transformation is feasible");
  }
  if (const auto* w = std::get_if<ViolationWitness>(&branch.certificate)) {
    rep.witnesses.push_back(w->inequality);
  }

  // f_mu at mu = y weighs D1 below D2.
  const double mu = inst.y;
  const Inequality muw{"f_mu", {}, mu,
                       inst.p1 * f_mu(inst.x1, mu) + inst.p2() * f_mu(inst.x2, mu),
                       f_mu(inst.y, mu)};
  rep.witnesses.push_back(muw);
  if (muw.holds(tol.decision)) return fail("f_mu at mu = y is not violated");

  rep.certified = true;
  return rep;
}

// ---------------------------------------------------------------------------
// d = 4 pair rho = p1 |psi1><psi1| + p2 |psi2><psi2| (blocks {0,1} and {2,3})
// and sigma = |phi>.

class Theorem1Instance {
 public:
  Theorem1Instance(double p1, double lambda, double eta) : p1_(p1), lambda_(lambda), eta_(eta) {
    if (!(p1 > 0.0 && p1 < 1.0)) throw DomainError("Theorem1Instance: p1 must lie in (0,1)");
    if (!(lambda > 0.0 && lambda < eta && eta < 0.5)) {
      throw DomainError("Theorem1Instance: requires 0 < lambda < eta < 1/2, got lambda = " +
                        std::to_string(lambda) + ", eta = " + std::to_string(eta));
    }
  }

  double p1() const { return p1_; }
  double p2() const { return 1.0 - p1_; }
  double lambda() const { return lambda_; }
  double eta() const { return eta_; }

  // (|00> + |11>) / sqrt 2
  PureState psi1() const { return diagonal({{0, 0.5}, {1, 0.5}}); }
  // sqrt(lambda) |22> + sqrt(1 - lambda) |33>
  PureState psi2() const { return diagonal({{2, lambda_}, {3, 1.0 - lambda_}}); }
  // sqrt(eta) |00> + sqrt(1 - eta) |11>
  PureState sigma() const { return diagonal({{0, eta_}, {1, 1.0 - eta_}}); }

  /// Monotone value of rho: the local measurement {P0, P1} separates the
  /// blocks reversibly, so E(rho) = p1 E(psi1) + p2 E(psi2).
  double rho_value(const PureMonotone& m) const {
    return block_mixture_monotone(p1_, m(schmidt_decompose(psi1())), m(schmidt_decompose(psi2())));
  }
  double sigma_value(const PureMonotone& m) const { return m(schmidt_decompose(sigma())); }

 private:
  static PureState diagonal(std::initializer_list<std::pair<std::size_t, double>> weights) {
    std::vector<Complex> c(16, Complex{});
    for (const auto& [i, w] : weights) c[i * 4 + i] = std::sqrt(w);
    return PureState(4, std::move(c));
  }

  double p1_, lambda_, eta_;
};

struct Theorem1Generation {
  std::optional<Theorem1Instance> instance;
  std::vector<Inequality> checks;
  // Label of the first failing inequality, empty on success.
  std::string failed;
};

/// Builds the pair and checks E(rho) >= E(sigma) for every monotone given.
inline Theorem1Generation gen_theorem1_instance(double p1, double lambda, double eta,
                                                const std::vector<PureMonotone>& finite_set,
                                                const Tolerances& tol = kDefaultTolerances) {
  Theorem1Instance inst(p1, lambda, eta);
  Theorem1Generation gen;
  for (const auto& m : finite_set) {
    Inequality ineq{m.label, {}, {}, inst.rho_value(m), inst.sigma_value(m)};
    if (gen.failed.empty() && !ineq.holds(tol.decision)) gen.failed = m.label;
    gen.checks.push_back(ineq);
  }
  if (gen.failed.empty()) gen.instance = inst;
  return gen;
}

/// Tail sums E_0..E_3 on d = 4.
inline std::vector<PureMonotone> tail_sum_family(std::size_t d = 4) {
  std::vector<PureMonotone> out;
  for (std::size_t k = 0; k < d; ++k) out.push_back(tail_sum_monotone(k));
  return out;
}

/// base_e of sigma, psi1 and psi2: the breakpoints of mu -> E_mu.
inline std::vector<double> theorem1_critical_mus(const Theorem1Instance& inst) {
  return {base_e(schmidt_decompose(inst.sigma())), base_e(schmidt_decompose(inst.psi1())),
          base_e(schmidt_decompose(inst.psi2()))};
}

/// Uniform grid of n + 1 points joined with the critical values, ascending.
inline std::vector<double> theorem1_default_grid(const Theorem1Instance& inst, int n = 10000) {
  auto g = uniform_mu_grid(n);
  for (double c : theorem1_critical_mus(inst)) g.push_back(c);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

/// Scans the grid for mu with E_mu(rho) < E_mu(sigma) and returns the
/// strongest violation (smallest mu on ties) as a negative verdict.
inline DecisionReport find_mu_witness(const Theorem1Instance& inst, const std::vector<double>& grid,
                                      const Tolerances& tol = kDefaultTolerances) {
  for (double c : theorem1_critical_mus(inst)) {
    const bool present = std::any_of(grid.begin(), grid.end(),
                                     [&](double g) { return std::abs(g - c) <= 1e-12; });
    if (!present) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "find_mu_witness: grid lacks critical value " << c;
      throw CertificationError(msg.str());
    }
  }
  std::optional<Inequality> best;
  for (double mu : grid) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("find_mu_witness: mu outside [0,1]");
    const PureMonotone m = e_mu_monotone(mu);
    Inequality ineq{"E_mu", {}, mu, inst.rho_value(m), inst.sigma_value(m)};
    if (ineq.holds(tol.decision)) continue;
    if (!best || ineq.margin() < best->margin()) best = ineq;
  }
  if (!best) throw CertificationError("find_mu_witness: no mu on the grid separates rho from sigma");
  DecisionReport rep;
  rep.verdict = false;
  rep.method = "e_mu_witness";
  rep.certificate = ViolationWitness{*best};
  rep.margins.push_back(*best);
  return rep;
}

inline CertificationReport verify_theorem1(const Theorem1Instance& inst,
                                           const std::vector<PureMonotone>& finite_set,
                                           const std::vector<double>& grid,
                                           const Tolerances& tol = kDefaultTolerances) {
  CertificationReport rep;
  rep.kind = "theorem1";
  const auto gen = gen_theorem1_instance(inst.p1(), inst.lambda(), inst.eta(), finite_set, tol);
  rep.conditions = gen.checks;
  if (!gen.failed.empty()) {
    rep.failure = "inequality " + gen.failed + " fails: E(rho) < E(sigma)";
    return rep;
  }
  try {
    const auto w = find_mu_witness(inst, grid, tol);
    rep.witnesses.push_back(std::get<ViolationWitness>(w.certificate).inequality);
  } catch (const CertificationError& e) {
    rep.failure = e.what();
    return rep;
  }
  const auto branch = nielsen_convertible(schmidt_decompose(inst.psi2()),
                                          schmidt_decompose(inst.sigma()), tol);
  if (branch.verdict) {
    rep.failure = "psi2 converts to sigma; no branch obstruction";
    return rep;
  }
  rep.witnesses.push_back(std::get<ViolationWitness>(branch.certificate).inequality);
  rep.witnesses.push_back({"branch_x", {}, {}, 2.0 * inst.lambda(), 2.0 * inst.eta()});
  rep.certified = true;
  return rep;
}

}  // namespace locc
