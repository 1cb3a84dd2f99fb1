#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "locc/errors.hpp"
#include "locc/tolerance.hpp"

namespace locc {

using Complex = std::complex<double>;

/// Bipartite pure state on C^d (x) C^d, stored as the d x d coefficient
/// matrix c_ab of sum_ab c_ab |a>|b>, row-major.
class PureState {
 public:
  PureState(std::size_t dim, std::vector<Complex> coeffs,
            double norm_tol = kDefaultTolerances.normalization)
      : dim_(dim), coeffs_(std::move(coeffs)) {
    if (dim_ < 2) {
      throw ValidationError("PureState: dimension must be >= 2, got " + std::to_string(dim_));
    }
    if (coeffs_.size() != dim_ * dim_) {
      throw ValidationError("PureState: expected " + std::to_string(dim_ * dim_) +
                            " coefficients, got " + std::to_string(coeffs_.size()));
    }
    double norm2 = 0.0;
    for (const Complex& c : coeffs_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw ValidationError("PureState: non-finite amplitude");
      }
      norm2 += std::norm(c);
    }
    if (std::abs(norm2 - 1.0) > norm_tol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "PureState: squared norm is " << norm2 << " (defect " << norm2 - 1.0
          << ", tolerance " << norm_tol << ")";
      throw ValidationError(msg.str());
    }
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  const Complex& operator()(std::size_t a, std::size_t b) const { return coeffs_[a * dim_ + b]; }

 private:
  std::size_t dim_;
  std::vector<Complex> coeffs_;
};

/// Schmidt numbers, sorted descending and summing to one.
class SchmidtVector {
 public:
  explicit SchmidtVector(std::vector<double> lambdas,
                         double norm_tol = kDefaultTolerances.normalization)
      : lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) throw ValidationError("SchmidtVector: empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
      double& l = lambdas_[i];
      if (!std::isfinite(l)) throw ValidationError("SchmidtVector: non-finite entry");
      if (l < 0.0) {
        if (l < -kClipFloor) {
          throw ValidationError("SchmidtVector: entry " + std::to_string(i) + " is negative (" +
                                std::to_string(l) + ")");
        }
        l = 0.0;
      }
      if (l > 1.0 + norm_tol) {
        throw ValidationError("SchmidtVector: entry " + std::to_string(i) + " exceeds 1");
      }
      sum += l;
    }
    if (std::abs(sum - 1.0) > norm_tol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "SchmidtVector: entries sum to " << sum << " (defect " << sum - 1.0 << ")";
      throw ValidationError(msg.str());
    }
    std::stable_sort(lambdas_.begin(), lambdas_.end(), std::greater<>{});
  }

  std::size_t size() const { return lambdas_.size(); }
  double operator[](std::size_t i) const { return lambdas_[i]; }
  const std::vector<double>& values() const { return lambdas_; }
  double largest() const { return lambdas_.front(); }

  // Zero-padded copy of length n >= size().
  SchmidtVector padded(std::size_t n) const {
    if (n <= lambdas_.size()) return *this;
    std::vector<double> v = lambdas_;
    v.resize(n, 0.0);
    return SchmidtVector(std::move(v));
  }

 private:
  std::vector<double> lambdas_;
};

struct EnsembleEntry {
  double prob;
  PureState state;
};

/// Finite probability distribution of pure states sharing one dimension.
class Ensemble {
 public:
  explicit Ensemble(std::vector<EnsembleEntry> entries,
                    double norm_tol = kDefaultTolerances.normalization)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw ValidationError("Ensemble: no entries");
    double sum = 0.0;
    const std::size_t d = entries_.front().state.dim();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (!(e.prob > 0.0 && e.prob <= 1.0 + norm_tol)) {
        throw ValidationError("Ensemble: entry " + std::to_string(i) +
                              " probability must lie in (0, 1], got " + std::to_string(e.prob));
      }
      if (e.state.dim() != d) {
        throw ValidationError("Ensemble: entry " + std::to_string(i) + " has dimension " +
                              std::to_string(e.state.dim()) + ", expected " + std::to_string(d));
      }
      sum += e.prob;
    }
    if (std::abs(sum - 1.0) > norm_tol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "Ensemble: probabilities sum to " << sum << " (defect " << sum - 1.0 << ")";
      throw ValidationError(msg.str());
    }
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const { return entries_.front().state.dim(); }
  const EnsembleEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<EnsembleEntry>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::vector<EnsembleEntry> entries_;
};

/// Row-stochastic matrix q[i][j] = probability that branch i outputs target j.
class ConditionalChannel {
 public:
  explicit ConditionalChannel(std::vector<std::vector<double>> q,
                              double tol = kDefaultTolerances.normalization)
      : q_(std::move(q)) {
    if (q_.empty() || q_.front().empty()) throw ValidationError("ConditionalChannel: empty");
    const std::size_t n2 = q_.front().size();
    for (std::size_t i = 0; i < q_.size(); ++i) {
      if (q_[i].size() != n2) throw ValidationError("ConditionalChannel: ragged rows");
      double sum = 0.0;
      for (std::size_t j = 0; j < n2; ++j) {
        const double v = q_[i][j];
        if (!(v >= -tol && v <= 1.0 + tol)) {
          throw ValidationError("ConditionalChannel: q[" + std::to_string(i) + "][" +
                                std::to_string(j) + "] = " + std::to_string(v) +
                                " outside [0,1]");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw ValidationError("ConditionalChannel: row " + std::to_string(i) + " sums to " +
                              std::to_string(sum));
      }
    }
  }

  std::size_t sources() const { return q_.size(); }
  std::size_t targets() const { return q_.front().size(); }
  double operator()(std::size_t i, std::size_t j) const { return q_[i][j]; }
  const std::vector<std::vector<double>>& rows() const { return q_; }

 private:
  std::vector<std::vector<double>> q_;
};

namespace detail {

// One-sided Jacobi (Hestenes) on the columns of a row-major d x d matrix.
// Returns the squared column norms after orthogonalization, i.e. the squared
// singular values, unsorted.
inline std::vector<double> squared_singular_values(std::vector<Complex> a, std::size_t d) {
  auto col_dot = [&](std::size_t p, std::size_t q) {
    Complex s{};
    for (std::size_t r = 0; r < d; ++r) s += std::conj(a[r * d + p]) * a[r * d + q];
    return s;
  };
  auto col_norm2 = [&](std::size_t p) {
    double s = 0.0;
    for (std::size_t r = 0; r < d; ++r) s += std::norm(a[r * d + p]);
    return s;
  };

  constexpr int kMaxSweeps = 60;
  constexpr double kEps = 1e-15;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double alpha = col_norm2(p);
        const double beta = col_norm2(q);
        const Complex gamma = col_dot(p, q);
        const double g = std::abs(gamma);
        if (g <= kEps * std::sqrt(alpha * beta) || g == 0.0) continue;
        rotated = true;
        // Rotate column q by the phase of gamma so the overlap becomes real.
        const Complex phase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < d; ++r) {
          const Complex ap = a[r * d + p];
          const Complex aq = a[r * d + q] * phase;
          a[r * d + p] = c * ap - s * aq;
          a[r * d + q] = s * ap + c * aq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> out(d);
  for (std::size_t p = 0; p < d; ++p) out[p] = col_norm2(p);
  return out;
}

}  // namespace detail

/// Schmidt numbers of |psi>: squared singular values of its coefficient
/// matrix, normalized and sorted descending.
inline SchmidtVector schmidt_decompose(const PureState& state) {
  std::vector<double> s = detail::squared_singular_values(state.coeffs(), state.dim());
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  for (double& v : s) v /= total;
  return SchmidtVector(std::move(s));
}

/// Canonical embedding sum_i sqrt(lambda_i) |ii>.
inline PureState from_schmidt(const SchmidtVector& lambdas) {
  const std::size_t d = std::max<std::size_t>(lambdas.size(), 2);
  std::vector<Complex> c(d * d, Complex{});
  for (std::size_t i = 0; i < lambdas.size(); ++i) c[i * d + i] = std::sqrt(lambdas[i]);
  return PureState(d, std::move(c));
}

/// x = 2 min(lambda_0, lambda_1) of a two-qubit pure state.
inline double x_param(const SchmidtVector& lambdas) {
  if (lambdas.size() != 2) {
    throw DimensionError("x_param: requires a 2x2 state, got Schmidt rank bound " +
                         std::to_string(lambdas.size()));
  }
  return std::clamp(2.0 * std::min(lambdas[0], lambdas[1]), 0.0, 1.0);
}

inline double x_param(const PureState& state) {
  if (state.dim() != 2) {
    throw DimensionError("x_param: requires d = 2, got d = " + std::to_string(state.dim()));
  }
  return x_param(schmidt_decompose(state));
}

/// Two-qubit state with x-parameter x, as sqrt(1 - x/2)|00> + sqrt(x/2)|11>.
inline PureState two_qubit_from_x(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("two_qubit_from_x: x must lie in [0,1]");
  return from_schmidt(SchmidtVector({1.0 - x / 2.0, x / 2.0}));
}

/// Haar-random d x d unitary (QR of a complex Ginibre matrix, phase-fixed).
template <class Rng>
std::vector<Complex> random_unitary(std::size_t d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> u(d * d);
  for (auto& z : u) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z = Complex(re, im);
  }
  // Modified Gram-Schmidt on columns.
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      Complex dot{};
      for (std::size_t r = 0; r < d; ++r) dot += std::conj(u[r * d + j]) * u[r * d + k];
      for (std::size_t r = 0; r < d; ++r) u[r * d + k] -= dot * u[r * d + j];
    }
    double n = 0.0;
    for (std::size_t r = 0; r < d; ++r) n += std::norm(u[r * d + k]);
    n = std::sqrt(n);
    for (std::size_t r = 0; r < d; ++r) u[r * d + k] /= n;
  }
  return u;
}

/// Applies local unitaries: C -> U C V^T.
inline std::vector<Complex> apply_local_unitaries(std::span<const Complex> c,
                                                  std::span<const Complex> u,
                                                  std::span<const Complex> v, std::size_t d) {
  std::vector<Complex> tmp(d * d, Complex{});
  std::vector<Complex> out(d * d, Complex{});
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t b = 0; b < d; ++b) tmp[a * d + b] += u[a * d + k] * c[k * d + b];
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t k = 0; k < d; ++k) out[a * d + b] += tmp[a * d + k] * v[b * d + k];
  return out;
}

/// Uniform point on the probability simplex (normalized exponentials).
template <class Rng>
std::vector<double> sample_simplex(std::size_t d, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w(d);
  double total = 0.0;
  for (double& v : w) {
    v = -std::log1p(-unif(rng));
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

/// Random state with uniform-simplex Schmidt spectrum and Haar local bases.
/// Deterministic for a given seed.
inline PureState sample_random_state(std::size_t d, std::uint64_t rng_seed) {
  if (d < 2) throw DomainError("sample_random_state: d must be >= 2");
  std::mt19937_64 rng(rng_seed);
  SchmidtVector lambdas(sample_simplex(d, rng));
  const PureState diag = from_schmidt(lambdas);
  const auto u = random_unitary(d, rng);
  const auto v = random_unitary(d, rng);
  auto c = apply_local_unitaries(diag.coeffs(), u, v, d);
  double n = 0.0;
  for (const auto& z : c) n += std::norm(z);
  for (auto& z : c) z /= std::sqrt(n);
  return PureState(d, std::move(c));
}

}  // namespace locc
