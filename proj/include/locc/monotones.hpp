#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "locc/errors.hpp"
#include "locc/states.hpp"
#include "locc/tolerance.hpp"

namespace locc {

/// Value of an entanglement monotone, in [0, 1].
class MonotoneValue {
 public:
  explicit MonotoneValue(double v, double tol = kDefaultTolerances.decision) {
    if (!(v >= -tol && v <= 1.0 + tol)) {
      throw DomainError("MonotoneValue: " + std::to_string(v) + " outside [0,1]");
    }
    value_ = std::clamp(v, 0.0, 1.0);
  }
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_ = 0.0;
};

/// A function f on [0,1] of the two-qubit x-parameter, meant to satisfy
/// monotonicity, concavity, f(0) = 0 and f(1) = 1.
struct MonotoneProfile {
  std::function<double(double)> eval;
  // f(0) = 0 and f(x) = 1 for every x > 0.
  bool is_schmidt_like = false;
  std::string label;

  double operator()(double x) const { return eval(x); }
};

namespace detail {

inline void require_unit(double v, const char* what, const char* op) {
  if (!(v >= -kClipFloor && v <= 1.0 + kClipFloor)) {
    std::ostringstream msg;
    msg << op << ": " << what << " = " << v << " outside [0,1]";
    throw DomainError(msg.str());
  }
}

}  // namespace detail

/// Tail sum E_k = sum_{i >= k} lambda_i.
inline MonotoneValue e_k(const SchmidtVector& lambdas, std::size_t k) {
  if (k >= lambdas.size()) {
    throw IndexError("e_k: k = " + std::to_string(k) + " out of range for d = " +
                     std::to_string(lambdas.size()));
  }
  double s = 0.0;
  for (std::size_t i = lambdas.size(); i-- > k;) s += lambdas[i];
  return MonotoneValue(s);
}

/// f_mu(x) = x / mu for x <= mu, 1 otherwise; mu = 0 is the Schmidt function.
inline MonotoneValue f_mu(double x, double mu) {
  detail::require_unit(x, "x", "f_mu");
  detail::require_unit(mu, "mu", "f_mu");
  x = std::clamp(x, 0.0, 1.0);
  mu = std::clamp(mu, 0.0, 1.0);
  if (mu == 0.0) return MonotoneValue(x > 0.0 ? 1.0 : 0.0);
  return MonotoneValue(x <= mu ? x / mu : 1.0);
}

/// (4/3)(1 - lambda_max); equals 1 on the maximally entangled d = 4 state.
inline MonotoneValue base_e(const SchmidtVector& lambdas) {
  return MonotoneValue(4.0 / 3.0 * (1.0 - lambdas.largest()));
}

/// E_mu built from a normalized monotone value E: E / mu if E <= mu, else 1.
inline MonotoneValue e_mu_from_base(double e_value, double mu,
                                    double tol = kDefaultTolerances.decision) {
  detail::require_unit(e_value, "E", "e_mu_from_base");
  detail::require_unit(mu, "mu", "e_mu_from_base");
  e_value = std::clamp(e_value, 0.0, 1.0);
  mu = std::clamp(mu, 0.0, 1.0);
  if (mu == 0.0) return MonotoneValue(e_value <= tol ? 0.0 : 1.0);
  if (e_value <= mu + tol) return MonotoneValue(std::min(1.0, e_value / mu));
  return MonotoneValue(1.0);
}

inline MonotoneProfile f_mu_profile(double mu) {
  detail::require_unit(mu, "mu", "f_mu_profile");
  std::ostringstream label;
  label.precision(17);
  label << "f_mu(" << mu << ")";
  return MonotoneProfile{[mu](double x) { return f_mu(x, mu).value(); }, mu == 0.0, label.str()};
}

inline MonotoneProfile schmidt_profile() {
  return MonotoneProfile{[](double x) { return x > 0.0 ? 1.0 : 0.0; }, true, "schmidt"};
}

/// Linear interpolation through knots (x ascending). Knots must start at
/// (0, 0) and end at (1, 1); shape is checked by validate_profile.
inline MonotoneProfile piecewise_linear_profile(std::vector<std::pair<double, double>> knots,
                                                std::string label = "piecewise_linear") {
  if (knots.size() < 2) throw ValidationError("piecewise_linear: need at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [x, y] = knots[i];
    if (!std::isfinite(x) || !std::isfinite(y) || x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) {
      throw ValidationError("piecewise_linear: knot " + std::to_string(i) + " outside [0,1]^2");
    }
    if (i > 0 && !(x > knots[i - 1].first)) {
      throw ValidationError("piecewise_linear: knot " + std::to_string(i) +
                            " x not strictly increasing");
    }
  }
  if (knots.front().first != 0.0 || knots.back().first != 1.0) {
    throw ValidationError("piecewise_linear: knots must span x = 0 to x = 1");
  }
  auto eval = [knots = std::move(knots)](double x) {
    x = std::clamp(x, 0.0, 1.0);
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const auto& k) { return v < k.first; });
    if (it == knots.end()) return knots.back().second;
    if (it == knots.begin()) return knots.front().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (x - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
  };
  return MonotoneProfile{std::move(eval), false, std::move(label)};
}

/// sum_i p_i f(x_i) over a two-qubit ensemble.
inline MonotoneValue ensemble_monotone(const Ensemble& d, const MonotoneProfile& profile) {
  if (d.dim() != 2) {
    throw DimensionError("ensemble_monotone: profiles act on 2x2 states, got d = " +
                         std::to_string(d.dim()));
  }
  double s = 0.0;
  for (const auto& e : d) s += e.prob * profile(x_param(e.state));
  return MonotoneValue(s);
}

/// sum_i p_i E_k(state_i).
inline MonotoneValue ensemble_ek(const Ensemble& d, std::size_t k) {
  if (k >= d.dim()) {
    throw IndexError("ensemble_ek: k = " + std::to_string(k) + " out of range for d = " +
                     std::to_string(d.dim()));
  }
  double s = 0.0;
  for (const auto& e : d) s += e.prob * e_k(schmidt_decompose(e.state), k).value();
  return MonotoneValue(s);
}

/// p1 v1 + (1 - p1) v2. Equals the mixed-state monotone value only for
/// states that are block-diagonal under a local projective measurement
/// whose outcomes are the two pure components.
inline MonotoneValue block_mixture_monotone(double p1, double v1, double v2) {
  detail::require_unit(p1, "p1", "block_mixture_monotone");
  detail::require_unit(v1, "v1", "block_mixture_monotone");
  detail::require_unit(v2, "v2", "block_mixture_monotone");
  return MonotoneValue(p1 * v1 + (1.0 - p1) * v2);
}

// ---------------------------------------------------------------------------
// Axiom checks on sampled grids.

struct ValidationReport {
  bool passed = true;
  // Name of the failed property ("monotonicity", "concavity", ...), empty on success.
  std::string check;
  std::string message;
  std::vector<double> witness_x;
  std::vector<double> witness_f;
};

inline constexpr int kDefaultGridSize = 1001;

namespace detail {

inline std::vector<double> uniform_grid(int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  return g;
}

inline ValidationReport fail(std::string check, std::string message, std::vector<double> xs,
                             std::vector<double> fs) {
  return ValidationReport{false, std::move(check), std::move(message), std::move(xs),
                          std::move(fs)};
}

}  // namespace detail

/// Checks monotonicity (all pairs), midpoint concavity (all grid pairs with
/// a grid midpoint), range and normalization on a uniform grid. Schmidt-like
/// profiles are checked structurally instead.
inline ValidationReport validate_profile(const MonotoneProfile& profile,
                                         int grid_size = kDefaultGridSize,
                                         double tol = kDefaultTolerances.decision) {
  if (grid_size < 3) throw DomainError("validate_profile: grid_size must be >= 3");
  const auto xs = detail::uniform_grid(grid_size);
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = profile(xs[i]);

  if (profile.is_schmidt_like) {
    if (fs[0] != 0.0) return detail::fail("schmidt_structure", "f(0) != 0", {0.0}, {fs[0]});
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (fs[i] != 1.0) {
        return detail::fail("schmidt_structure", "f(x) != 1 for x > 0", {xs[i]}, {fs[i]});
      }
    }
    return {};
  }

  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(fs[i]) || fs[i] < -tol || fs[i] > 1.0 + tol) {
      return detail::fail("range", "f(x) outside [0,1]", {xs[i]}, {fs[i]});
    }
  }
  if (std::abs(fs.front()) > tol) {
    return detail::fail("normalization", "f(0) != 0", {0.0}, {fs.front()});
  }
  if (std::abs(fs.back() - 1.0) > tol) {
    return detail::fail("normalization", "f(1) != 1", {1.0}, {fs.back()});
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (fs[j] < fs[i] - tol) {
        return detail::fail("monotonicity", "f decreases between grid points", {xs[i], xs[j]},
                            {fs[i], fs[j]});
      }
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 2; j < xs.size(); j += 2) {
      const std::size_t m = (i + j) / 2;
      if (fs[m] < 0.5 * (fs[i] + fs[j]) - tol) {
        return detail::fail("concavity", "midpoint value below chord", {xs[i], xs[j]},
                            {fs[i], fs[j], fs[m]});
      }
    }
  }
  return {};
}

/// f(x) >= x on the grid.
inline ValidationReport check_lemma1(const MonotoneProfile& profile,
                                     int grid_size = kDefaultGridSize,
                                     double tol = kDefaultTolerances.decision) {
  if (grid_size < 3) throw DomainError("check_lemma1: grid_size must be >= 3");
  for (double x : detail::uniform_grid(grid_size)) {
    const double f = profile(x);
    if (f < x - tol) return detail::fail("lemma1", "f(x) < x", {x}, {f});
  }
  return {};
}

/// If f(x1) = f(x2) for x1 != x2, both values must equal 1.
inline ValidationReport check_lemma2(const MonotoneProfile& profile, double x1, double x2,
                                     double tol = kDefaultTolerances.decision) {
  if (x1 == x2) throw DomainError("check_lemma2: requires x1 != x2");
  const double f1 = profile(x1);
  const double f2 = profile(x2);
  if (std::abs(f1 - f2) > tol) return {};
  if (std::abs(f1 - 1.0) > tol || std::abs(f2 - 1.0) > tol) {
    return detail::fail("lemma2", "equal values below 1 at distinct points", {x1, x2}, {f1, f2});
  }
  return {};
}

// ---------------------------------------------------------------------------
// Monotones on Schmidt vectors of arbitrary dimension.

struct PureMonotone {
  std::string label;
  std::function<double(const SchmidtVector&)> eval;

  double operator()(const SchmidtVector& s) const { return eval(s); }
};

inline PureMonotone tail_sum_monotone(std::size_t k) {
  return PureMonotone{"E_" + std::to_string(k),
                      [k](const SchmidtVector& s) { return e_k(s, k).value(); }};
}

inline PureMonotone base_e_monotone() {
  return PureMonotone{"E_base", [](const SchmidtVector& s) { return base_e(s).value(); }};
}

inline PureMonotone e_mu_monotone(double mu) {
  detail::require_unit(mu, "mu", "e_mu_monotone");
  std::ostringstream label;
  label.precision(17);
  label << "E_mu(" << mu << ")";
  return PureMonotone{label.str(), [mu](const SchmidtVector& s) {
                        return e_mu_from_base(base_e(s).value(), mu).value();
                      }};
}

}  // namespace locc
