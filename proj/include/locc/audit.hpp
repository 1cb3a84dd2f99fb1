#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <regex>
#include <string>
#include <variant>
#include <vector>

#include "locc/report.hpp"

// Re-checks DecisionReport certificates from the raw distributions only.
// Deliberately shares no arithmetic with the deciders: tail sums, f_mu and
// the capacity formula are recomputed here from plain vectors.

namespace locc::audit {

/// D1 = {(p_i, lambda_i)} -> D2 = {(q_j, phi_j)} with raw Schmidt vectors.
/// A pure source is the one-entry distribution.
struct RawInstance {
  std::vector<double> p;
  std::vector<std::vector<double>> sources;
  std::vector<double> q;
  std::vector<std::vector<double>> targets;
};

struct AuditResult {
  bool ok = false;
  std::string message;
};

namespace detail {

inline std::vector<double> sorted_desc(std::vector<double> v, std::size_t d) {
  v.resize(std::max(v.size(), d), 0.0);
  std::sort(v.begin(), v.end(), std::greater<>{});
  return v;
}

inline std::size_t common_dim(const RawInstance& r) {
  std::size_t d = 0;
  for (const auto& s : r.sources) d = std::max(d, s.size());
  for (const auto& s : r.targets) d = std::max(d, s.size());
  return d;
}

inline double tail(const std::vector<double>& lam, std::size_t k, std::size_t d) {
  const auto v = sorted_desc(lam, d);
  double s = 0.0;
  for (std::size_t i = k; i < v.size(); ++i) s += v[i];
  return s;
}

inline double x_of(const std::vector<double>& lam) { return 2.0 * tail(lam, 1, 2); }

inline double f(double x, double mu) {
  if (mu == 0.0) return x > 0.0 ? 1.0 : 0.0;
  return std::min(1.0, x / mu);
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline AuditResult bad(std::string m) { return {false, std::move(m)}; }
inline AuditResult good() { return {true, "ok"}; }

// Recomputes the two sides of a named inequality; nullopt if the name is
// not one this auditor understands for the given instance.
inline std::optional<std::pair<double, double>> recompute(const Inequality& q,
                                                          const RawInstance& r) {
  const std::size_t d = common_dim(r);
  if (q.name == "tail_sum" && q.k && r.sources.size() == 1 && r.targets.size() == 1) {
    return std::pair{tail(r.sources[0], *q.k, d), tail(r.targets[0], *q.k, d)};
  }
  if (q.name == "ensemble_tail_sum" && q.k && r.sources.size() == 1) {
    double rhs = 0.0;
    for (std::size_t j = 0; j < r.targets.size(); ++j) rhs += r.q[j] * tail(r.targets[j], *q.k, d);
    return std::pair{tail(r.sources[0], *q.k, d), rhs};
  }
  if (r.sources.size() == 2 && r.targets.size() == 2) {
    // Two-qubit distributions in canonical order x1 >= x2, y1 >= y2.
    double x1 = x_of(r.sources[0]), x2 = x_of(r.sources[1]);
    double p1 = r.p[0], p2 = r.p[1];
    if (x1 < x2) {
      std::swap(x1, x2);
      std::swap(p1, p2);
    }
    double y1 = x_of(r.targets[0]), y2 = x_of(r.targets[1]);
    double q1 = r.q[0], q2 = r.q[1];
    if (y1 < y2) {
      std::swap(y1, y2);
      std::swap(q1, q2);
    }
    if (q.name == "branch2_x_vs_y2") return std::pair{x2, y2};
    if (q.name == "mixture_capacity") {
      auto cap = [&](double x) { return std::clamp((x - y2) / (y1 - y2), 0.0, 1.0); };
      return std::pair{p1 * cap(x1) + p2 * cap(x2), q1};
    }
  }
  if (q.name == "f_mu" && q.mu && d == 2) {
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < r.sources.size(); ++i) lhs += r.p[i] * f(x_of(r.sources[i]), *q.mu);
    for (std::size_t j = 0; j < r.targets.size(); ++j) rhs += r.q[j] * f(x_of(r.targets[j]), *q.mu);
    return std::pair{lhs, rhs};
  }
  if (q.name == "E_mu" && q.mu && d == 4) {
    // Sources are the blocks of a block-diagonal mixture, so the mixed value
    // is the probability-weighted block value.
    auto e = [&](const std::vector<double>& lam) {
      const double base = 4.0 / 3.0 * (1.0 - *std::max_element(lam.begin(), lam.end()));
      if (*q.mu == 0.0) return base > 0.0 ? 1.0 : 0.0;
      return std::min(1.0, base / *q.mu);
    };
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < r.sources.size(); ++i) lhs += r.p[i] * e(r.sources[i]);
    for (std::size_t j = 0; j < r.targets.size(); ++j) rhs += r.q[j] * e(r.targets[j]);
    return std::pair{lhs, rhs};
  }
  return std::nullopt;
}

inline AuditResult check_channel(const std::vector<std::vector<double>>& c, const RawInstance& r,
                                 double tol) {
  const std::size_t n1 = r.p.size(), n2 = r.q.size(), d = common_dim(r);
  if (c.size() != n1) return bad("channel has wrong number of rows");
  for (std::size_t i = 0; i < n1; ++i) {
    if (c[i].size() != n2) return bad("channel row has wrong width");
    double s = 0.0;
    for (double v : c[i]) {
      if (v < -tol || v > 1.0 + tol) return bad("channel entry outside [0,1]");
      s += v;
    }
    if (!close(s, 1.0, tol)) return bad("channel row " + std::to_string(i) + " not stochastic");
  }
  for (std::size_t j = 0; j < n2; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n1; ++i) s += r.p[i] * c[i][j];
    if (!close(s, r.q[j], tol)) return bad("mixture mismatch at target " + std::to_string(j));
  }
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      double avg = 0.0;
      for (std::size_t j = 0; j < n2; ++j) avg += c[i][j] * tail(r.targets[j], k, d);
      if (tail(r.sources[i], k, d) < avg - tol) {
        return bad("branch " + std::to_string(i) + " violates tail sum k = " + std::to_string(k));
      }
    }
  }
  return good();
}

// Coefficients of a constraint row identified by its label, rebuilt from r.
inline std::optional<std::pair<std::vector<double>, std::pair<double, bool>>> row_of(
    const std::string& label, const RawInstance& r) {
  const std::size_t n1 = r.p.size(), n2 = r.q.size(), d = common_dim(r);
  std::vector<double> a(n1 * n2, 0.0);
  std::smatch m;
  static const std::regex stoch(R"(stochastic\[(\d+)\])");
  static const std::regex mix(R"(mixture\[(\d+)\])");
  static const std::regex branch(R"(branch\[(\d+)\]\.E_(\d+))");
  if (std::regex_match(label, m, stoch)) {
    const std::size_t i = std::stoul(m[1]);
    if (i >= n1) return std::nullopt;
    for (std::size_t j = 0; j < n2; ++j) a[i * n2 + j] = 1.0;
    return std::pair{a, std::pair{1.0, false}};
  }
  if (std::regex_match(label, m, mix)) {
    const std::size_t j = std::stoul(m[1]);
    if (j >= n2) return std::nullopt;
    for (std::size_t i = 0; i < n1; ++i) a[i * n2 + j] = r.p[i];
    return std::pair{a, std::pair{r.q[j], false}};
  }
  if (std::regex_match(label, m, branch)) {
    const std::size_t i = std::stoul(m[1]);
    const std::size_t k = std::stoul(m[2]);
    if (i >= n1 || k >= d) return std::nullopt;
    for (std::size_t j = 0; j < n2; ++j) a[i * n2 + j] = tail(r.targets[j], k, d);
    return std::pair{a, std::pair{tail(r.sources[i], k, d), true}};
  }
  return std::nullopt;
}

inline AuditResult check_farkas(const FarkasWitness& w, const RawInstance& r) {
  const std::size_t nv = r.p.size() * r.q.size();
  if (w.multipliers.size() != w.row_labels.size() || w.multipliers.empty()) {
    return bad("malformed Farkas vector");
  }
  std::vector<double> ya(nv, 0.0);
  double yb = 0.0, slop = 0.0;
  for (std::size_t t = 0; t < w.row_labels.size(); ++t) {
    const auto row = row_of(w.row_labels[t], r);
    if (!row) return bad("unknown constraint row " + w.row_labels[t]);
    const auto& [a, rhs_ub] = *row;
    const auto [rhs, ub] = rhs_ub;
    const double y = w.multipliers[t];
    // Slacks of <= rows lie in [0, rhs] because all coefficients are >= 0.
    if (ub && y > 0.0) slop += y * std::max(0.0, rhs);
    for (std::size_t c = 0; c < nv; ++c) ya[c] += y * a[c];
    yb += y * rhs;
  }
  for (double v : ya) slop += std::max(0.0, v);
  if (!(yb > slop)) return bad("Farkas combination does not separate (y.b <= slop)");
  return good();
}

}  // namespace detail

/// Re-verifies `rep` against the raw instance at tolerance `tol`.
inline AuditResult audit_report(const DecisionReport& rep, const RawInstance& raw,
                                double tol = 1e-8) {
  using namespace detail;
  if (raw.p.size() != raw.sources.size() || raw.q.size() != raw.targets.size()) {
    return bad("raw instance has mismatched probability/state counts");
  }
  return std::visit(
      [&](const auto& c) -> AuditResult {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ConditionalChannel>) {
          if (!rep.verdict) return bad("channel attached to a negative verdict");
          return check_channel(c.rows(), raw, tol);
        } else if constexpr (std::is_same_v<T, ViolationWitness>) {
          if (rep.verdict) return bad("violation attached to a positive verdict");
          const auto sides = recompute(c.inequality, raw);
          if (!sides) return bad("cannot recompute inequality " + c.inequality.name);
          if (!close(sides->first, c.inequality.lhs, tol) ||
              !close(sides->second, c.inequality.rhs, tol)) {
            return bad("recorded sides of " + c.inequality.name + " do not match recomputation");
          }
          if (!(sides->first < sides->second)) return bad(c.inequality.name + " is not violated");
          return good();
        } else if constexpr (std::is_same_v<T, FarkasWitness>) {
          if (rep.verdict) return bad("Farkas vector attached to a positive verdict");
          return check_farkas(c, raw);
        } else if constexpr (std::is_same_v<T, MarginTable>) {
          if (!rep.verdict) return bad("margin table attached to a negative verdict");
          for (const auto& row : c.rows) {
            const auto sides = recompute(row, raw);
            if (!sides) return bad("cannot recompute " + row.name);
            if (!close(sides->first, row.lhs, tol) || !close(sides->second, row.rhs, tol)) {
              return bad("recorded sides of " + row.name + " do not match recomputation");
            }
            if (sides->first < sides->second - tol) return bad(row.name + " is violated");
          }
          return good();
        } else {
          return bad("trivial certificates are not auditable");
        }
      },
      rep.certificate);
}

}  // namespace locc::audit
