#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "locc/errors.hpp"
#include "locc/monotones.hpp"
#include "locc/report.hpp"
#include "locc/states.hpp"
#include "locc/tolerance.hpp"

namespace locc {

enum class RowKind { kEquality, kUpperBound };

/// coeffs . z (== or <=) rhs over the variables z = q_{j|i}, ordered
/// row-major in i: index i * n2 + j.
struct ConstraintRow {
  std::string label;
  RowKind kind = RowKind::kEquality;
  std::vector<double> coeffs;
  double rhs = 0.0;
};

/// Linear system whose feasible points are the conditional channels that
/// realize D1 -> D2 branch by branch, with each branch satisfying the
/// pure-to-ensemble tail-sum condition.
struct FeasibilityProblem {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<ConstraintRow> rows;

  std::size_t variables() const { return n1 * n2; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * n2 + j; }
};

// Tail sums below this are treated as exact zeros: they sit under the
// accuracy of the Schmidt decomposition.
inline constexpr double kCoefficientSnap = 1e-12;
// Rows whose largest coefficient is nonzero but below this are rejected.
inline constexpr double kConditioningFloor = 1e-10;

inline FeasibilityProblem build_problem(const std::vector<double>& p,
                                        const std::vector<SchmidtVector>& sources,
                                        const std::vector<double>& q,
                                        const std::vector<SchmidtVector>& targets) {
  if (p.size() != sources.size() || q.size() != targets.size() || p.empty() || q.empty()) {
    throw ValidationError("build_problem: probability/state count mismatch");
  }
  std::size_t d = 0;
  for (const auto& s : sources) d = std::max(d, s.size());
  for (const auto& s : targets) d = std::max(d, s.size());

  FeasibilityProblem prob;
  prob.n1 = p.size();
  prob.n2 = q.size();
  prob.p = p;
  prob.q = q;
  const std::size_t nv = prob.variables();
  auto snap = [](double v) { return std::abs(v) < kCoefficientSnap ? 0.0 : v; };

  for (std::size_t i = 0; i < prob.n1; ++i) {
    ConstraintRow r{"stochastic[" + std::to_string(i) + "]", RowKind::kEquality,
                    std::vector<double>(nv, 0.0), 1.0};
    for (std::size_t j = 0; j < prob.n2; ++j) r.coeffs[prob.index(i, j)] = 1.0;
    prob.rows.push_back(std::move(r));
  }
  for (std::size_t j = 0; j < prob.n2; ++j) {
    ConstraintRow r{"mixture[" + std::to_string(j) + "]", RowKind::kEquality,
                    std::vector<double>(nv, 0.0), q[j]};
    for (std::size_t i = 0; i < prob.n1; ++i) r.coeffs[prob.index(i, j)] = p[i];
    prob.rows.push_back(std::move(r));
  }
  // k = 0 is implied by the stochastic rows.
  for (std::size_t i = 0; i < prob.n1; ++i) {
    const SchmidtVector src = sources[i].padded(d);
    for (std::size_t k = 1; k < d; ++k) {
      ConstraintRow r{"branch[" + std::to_string(i) + "].E_" + std::to_string(k),
                      RowKind::kUpperBound, std::vector<double>(nv, 0.0),
                      snap(e_k(src, k).value())};
      for (std::size_t j = 0; j < prob.n2; ++j) {
        r.coeffs[prob.index(i, j)] = snap(e_k(targets[j].padded(d), k).value());
      }
      prob.rows.push_back(std::move(r));
    }
  }
  return prob;
}

inline FeasibilityProblem build_problem(const Ensemble& d1, const Ensemble& d2) {
  std::vector<double> p, q;
  std::vector<SchmidtVector> src, dst;
  for (const auto& e : d1) {
    p.push_back(e.prob);
    src.push_back(schmidt_decompose(e.state));
  }
  for (const auto& e : d2) {
    q.push_back(e.prob);
    dst.push_back(schmidt_decompose(e.state));
  }
  return build_problem(p, src, q, dst);
}

/// Evaluates every row of `prob` at the channel; returns the rows as
/// inequalities oriented lhs >= rhs (equalities appear twice).
inline std::vector<Inequality> evaluate_rows(const FeasibilityProblem& prob,
                                             const ConditionalChannel& channel) {
  std::vector<Inequality> out;
  for (const auto& r : prob.rows) {
    double az = 0.0;
    for (std::size_t i = 0; i < prob.n1; ++i)
      for (std::size_t j = 0; j < prob.n2; ++j) az += r.coeffs[prob.index(i, j)] * channel(i, j);
    if (r.kind == RowKind::kUpperBound) {
      out.push_back({r.label, {}, {}, r.rhs, az});
    } else {
      out.push_back({r.label + ".le", {}, {}, r.rhs, az});
      out.push_back({r.label + ".ge", {}, {}, az, r.rhs});
    }
  }
  return out;
}

namespace detail {

struct SimplexResult {
  double infeasibility = 0.0;  // phase-I optimum on the scaled system
  std::vector<double> z;       // structural variables
  std::vector<double> y;       // duals of the scaled rows
};

// Phase-I simplex with Bland's rule on A z (=|<=) b, z >= 0. Every row
// receives an artificial variable; rows are pre-scaled and sign-normalized
// so b >= 0.
inline SimplexResult phase_one(const std::vector<std::vector<double>>& a,
                               const std::vector<double>& b, const std::vector<bool>& is_ub,
                               std::size_t nz) {
  constexpr double kPivotEps = 1e-12;
  const std::size_t m = a.size();
  std::size_t ns = 0;
  for (bool u : is_ub) ns += u ? 1 : 0;
  const std::size_t n = nz + ns + m;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + 1, 0.0));
  std::vector<std::size_t> basis(m);

  std::size_t slack = nz;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < nz; ++c) t[r][c] = a[r][c];
    if (is_ub[r]) t[r][slack++] = 1.0;
    t[r][nz + ns + r] = 1.0;
    t[r][n] = b[r];
    basis[r] = nz + ns + r;
  }
  // Sign-normalize so the artificial basis is feasible.
  for (std::size_t r = 0; r < m; ++r) {
    if (t[r][n] < 0.0) {
      for (std::size_t c = 0; c < nz + ns; ++c) t[r][c] = -t[r][c];
      t[r][n] = -t[r][n];
    }
  }
  for (std::size_t c = 0; c < n + 1; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += t[r][c];
    t[m][c] = (c >= nz + ns && c < n) ? 1.0 - s : -s;
  }

  const std::size_t max_iter = 50 * (m + n) + 1000;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_iter) throw ConditioningError("lp_feasible: simplex iteration limit reached");
    std::size_t enter = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (t[m][c] < -kPivotEps) {
        enter = c;
        break;
      }
    }
    if (enter == n) break;
    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (t[r][enter] > kPivotEps) {
        const double ratio = t[r][n] / t[r][enter];
        if (leave == m || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
    }
    if (leave == m) throw ConditioningError("lp_feasible: unbounded phase-I direction");
    const double piv = t[leave][enter];
    for (double& v : t[leave]) v /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = t[r][enter];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n; ++c) t[r][c] -= f * t[leave][c];
    }
    basis[leave] = enter;
  }

  SimplexResult out;
  out.infeasibility = -t[m][n];
  out.z.assign(nz, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < nz) out.z[basis[r]] = t[r][n];
  out.y.resize(m);
  for (std::size_t r = 0; r < m; ++r) out.y[r] = 1.0 - t[m][nz + ns + r];
  return out;
}

}  // namespace detail

/// Decides feasibility of `prob`. A positive verdict carries a channel that
/// satisfies every row within the feasibility tolerance; a negative verdict
/// carries a Farkas vector over the original rows.
inline DecisionReport lp_feasible(const FeasibilityProblem& prob,
                                  const Tolerances& tol = kDefaultTolerances) {
  const std::size_t nz = prob.variables();
  if (nz == 0) throw ValidationError("lp_feasible: empty problem");

  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<bool> is_ub;
  std::vector<double> scale;
  std::vector<std::size_t> source_row;

  for (std::size_t r = 0; r < prob.rows.size(); ++r) {
    const auto& row = prob.rows[r];
    if (row.coeffs.size() != nz) {
      throw ValidationError("lp_feasible: row " + row.label + " has wrong width");
    }
    double amax = 0.0;
    for (double c : row.coeffs) {
      if (!std::isfinite(c)) throw ConditioningError("lp_feasible: non-finite entry in " + row.label);
      amax = std::max(amax, std::abs(c));
    }
    if (!std::isfinite(row.rhs)) throw ConditioningError("lp_feasible: non-finite rhs in " + row.label);
    if (amax == 0.0) {
      const bool ok = row.kind == RowKind::kUpperBound ? row.rhs >= -tol.feasibility
                                                       : std::abs(row.rhs) <= tol.feasibility;
      if (ok) continue;
      // 0 (=|<=) rhs is violated on its own.
      FarkasWitness w;
      w.row_labels = {row.label};
      const double y = row.kind == RowKind::kUpperBound ? -1.0 : (row.rhs > 0 ? 1.0 : -1.0);
      w.multipliers = {y};
      w.combined_rhs = y * row.rhs;
      DecisionReport rep{false, "lp", w, {}};
      rep.margins.push_back({row.label, {}, {}, row.rhs, 0.0});
      return rep;
    }
    if (amax < kConditioningFloor) {
      std::ostringstream msg;
      msg << "lp_feasible: row " << row.label << " has near-zero norm " << amax;
      throw ConditioningError(msg.str());
    }
    std::vector<double> scaled(nz);
    for (std::size_t c = 0; c < nz; ++c) scaled[c] = row.coeffs[c] / amax;
    a.push_back(std::move(scaled));
    b.push_back(row.rhs / amax);
    is_ub.push_back(row.kind == RowKind::kUpperBound);
    scale.push_back(amax);
    source_row.push_back(r);
  }

  // Sign normalization inside phase_one flips rows with b < 0; mirror it for the duals.
  std::vector<double> sign(b.size());
  for (std::size_t r = 0; r < b.size(); ++r) sign[r] = b[r] < 0.0 ? -1.0 : 1.0;

  const auto res = detail::phase_one(a, b, is_ub, nz);

  constexpr double kPhaseOneThreshold = 1e-9;
  if (res.infeasibility <= kPhaseOneThreshold) {
    std::vector<std::vector<double>> q(prob.n1, std::vector<double>(prob.n2, 0.0));
    for (std::size_t i = 0; i < prob.n1; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < prob.n2; ++j) {
        q[i][j] = std::clamp(res.z[prob.index(i, j)], 0.0, 1.0);
        s += q[i][j];
      }
      if (s <= 0.0) throw ConditioningError("lp_feasible: zero row in extracted channel");
      for (double& v : q[i]) v /= s;
    }
    ConditionalChannel channel(std::move(q));
    DecisionReport rep{true, "lp", channel, evaluate_rows(prob, channel)};
    for (const auto& ineq : rep.margins) {
      if (!ineq.holds(tol.feasibility)) {
        throw ConditioningError("lp_feasible: extracted channel violates " + ineq.name);
      }
    }
    return rep;
  }

  FarkasWitness w;
  double yb = 0.0;
  for (std::size_t r = 0; r < res.y.size(); ++r) {
    const auto& row = prob.rows[source_row[r]];
    const double y = res.y[r] * sign[r] / scale[r];
    w.multipliers.push_back(y);
    w.row_labels.push_back(row.label);
    yb += y * row.rhs;
  }
  w.combined_rhs = yb;
  DecisionReport rep{false, "lp", w, {}};
  rep.margins.push_back({"farkas", {}, {}, 0.0, yb});
  return rep;
}

/// Checks a Farkas vector against the original rows of `prob`. Since every
/// channel entry lies in [0,1] and each slack is bounded by its row's rhs,
/// y^T b must exceed the largest value y^T A z + sum_ub y_r s_r can take;
/// exact Farkas vectors have zero slop and y^T b > 0.
inline bool farkas_certifies(const FeasibilityProblem& prob, const FarkasWitness& w) {
  if (w.multipliers.size() != w.row_labels.size() || w.multipliers.empty()) return false;
  std::vector<double> ya(prob.variables(), 0.0);
  double yb = 0.0;
  double slop = 0.0;
  for (std::size_t r = 0; r < w.row_labels.size(); ++r) {
    auto it = std::find_if(prob.rows.begin(), prob.rows.end(),
                           [&](const ConstraintRow& row) { return row.label == w.row_labels[r]; });
    if (it == prob.rows.end()) return false;
    const double y = w.multipliers[r];
    if (it->kind == RowKind::kUpperBound && y > 0.0) slop += y * std::max(0.0, it->rhs);
    for (std::size_t c = 0; c < ya.size(); ++c) ya[c] += y * it->coeffs[c];
    yb += y * it->rhs;
  }
  for (double v : ya) slop += std::max(0.0, v);
  return yb > slop;
}

}  // namespace locc
