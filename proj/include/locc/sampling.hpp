#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "locc/decide.hpp"
#include "locc/monotones.hpp"
#include "locc/states.hpp"

namespace locc {

// Per-trial stream seed derived from a root seed (splitmix64 finalizer), so
// trial t draws the same values regardless of how trials are scheduled.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class Rng>
SchmidtVector random_schmidt(std::size_t d, Rng& rng) {
  return SchmidtVector(sample_simplex(d, rng));
}

/// p1, q1 uniform on (0,1); x's and y's uniform on [0,1].
template <class Rng>
TwoQubitDistInstance random_two_qubit_instance(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double p1 = unif(rng);
  double q1 = unif(rng);
  p1 = std::clamp(p1, 1e-6, 1.0 - 1e-6);
  q1 = std::clamp(q1, 1e-6, 1.0 - 1e-6);
  const double x1 = unif(rng), x2 = unif(rng), y1 = unif(rng), y2 = unif(rng);
  return TwoQubitDistInstance(p1, x1, 1.0 - p1, x2, q1, y1, 1.0 - q1, y2);
}

/// Random concave, non-decreasing, normalized piecewise-linear profile:
/// random breakpoints, slopes drawn then sorted descending (some may be
/// zero, giving a saturated tail), rescaled so f(1) = 1.
template <class Rng>
MonotoneProfile random_concave_profile(Rng& rng, std::string label = "random_pl") {
  std::uniform_int_distribution<int> segs(1, 6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = segs(rng);
  std::vector<double> breaks{0.0, 1.0};
  for (int i = 1; i < n; ++i) breaks.push_back(0.02 + 0.96 * unif(rng));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const std::size_t m = breaks.size() - 1;
  std::vector<double> slopes(m);
  for (auto& s : slopes) s = unif(rng) < 0.2 ? 0.0 : unif(rng);
  slopes[0] = std::max(slopes[0], 0.05);
  std::sort(slopes.begin(), slopes.end(), std::greater<>{});
  double rise = 0.0;
  for (std::size_t i = 0; i < m; ++i) rise += slopes[i] * (breaks[i + 1] - breaks[i]);
  std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    acc += slopes[i] * (breaks[i + 1] - breaks[i]) / rise;
    knots.emplace_back(breaks[i + 1], i + 1 == m ? 1.0 : std::min(acc, 1.0));
  }
  return piecewise_linear_profile(std::move(knots), std::move(label));
}

/// One to five random concave profiles, plus the Schmidt function with
/// probability 1/2.
template <class Rng>
std::vector<MonotoneProfile> random_profile_set(Rng& rng) {
  std::uniform_int_distribution<int> count(1, 5);
  std::bernoulli_distribution with_schmidt(0.5);
  std::vector<MonotoneProfile> set;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) set.push_back(random_concave_profile(rng, "random_pl_" + std::to_string(i)));
  if (with_schmidt(rng)) set.push_back(schmidt_profile());
  return set;
}

}  // namespace locc
